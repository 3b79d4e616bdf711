"""Transfer-learning seeded dynamic multiobjective evolutionary optimization."""

__version__ = "0.1.0"
