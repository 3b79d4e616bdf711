"""Kernels, maximum mean discrepancy and transfer component analysis.

TCA learns a projection ``W`` of the empirical kernel map so that source
and target samples have small MMD in the latent space while their
variance is kept. The leading eigenvectors of ``(K L K + mu I)^-1 K H K``
form ``W``; a point ``p`` is mapped to ``W^T k_p`` where ``k_p`` holds the
kernel values between ``p`` and every sample of the fitted bank.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist, pdist

from trdmoea.errors import ArgumentError, NumericalError

GAUSSIAN = "gaussian"
LINEAR = "linear"


@dataclass(frozen=True)
class KernelSpec:
    kind: str = GAUSSIAN
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, LINEAR):
            raise ArgumentError(f"unknown kernel kind {self.kind!r}")
        if self.kind == GAUSSIAN and not self.sigma > 0:
            raise ArgumentError(f"Gaussian bandwidth must be positive, got {self.sigma}")

    def matrix(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Kernel values between every row of ``A`` and every row of ``B``.

        Each entry depends only on its own pair of rows (no BLAS blocking),
        so a row's values do not change with the number of rows in ``A``.
        """
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if A.shape[1] != B.shape[1]:
            raise ArgumentError(f"vector lengths differ: {A.shape[1]} vs {B.shape[1]}")
        if self.kind == LINEAR:
            return np.einsum("ik,jk->ij", A, B)
        return np.exp(-cdist(A, B, "sqeuclidean") / (2.0 * self.sigma**2))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sigma": self.sigma}


def kernel_eval(k: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ArgumentError(f"vector lengths differ: {x.shape} vs {y.shape}")
    if k.kind == LINEAR:
        return float(np.dot(x, y))
    return float(np.exp(-np.sum((x - y) ** 2) / (2.0 * k.sigma**2)))


def median_bandwidth(points) -> float:
    """Median pairwise Euclidean distance; 1.0 when that median is zero."""
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if len(P) < 2:
        raise ArgumentError("median bandwidth needs at least two points")
    sigma = float(np.median(pdist(P)))
    return sigma if sigma > 0 else 1.0


def gram_matrix(points, k: KernelSpec) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) < 1:
        raise ArgumentError("gram matrix needs at least one point")
    K = k.matrix(P, P)
    # exact symmetry; the expanded-square form can differ in the last bit
    K = 0.5 * (K + K.T)
    if k.kind == GAUSSIAN:
        np.fill_diagonal(K, 1.0)
    return K


def scaling_matrix(m: int, n: int) -> np.ndarray:
    if m < 1 or n < 1:
        raise ArgumentError("scaling matrix needs m, n >= 1")
    e = np.concatenate([np.full(m, 1.0 / m), np.full(n, -1.0 / n)])
    return np.outer(e, e)


def centering_matrix(size: int) -> np.ndarray:
    if size < 1:
        raise ArgumentError("centering matrix needs size >= 1")
    return np.eye(size) - np.full((size, size), 1.0 / size)


def mmd(X, Y, k: KernelSpec) -> float:
    """Empirical squared MMD between samples ``X`` and ``Y`` as tr(K L)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if len(X) == 0 or len(Y) == 0:
        raise ArgumentError("mmd needs nonempty samples")
    if X.shape[1] != Y.shape[1]:
        raise ArgumentError("samples have different vector lengths")
    K = gram_matrix(np.vstack([X, Y]), k)
    L = scaling_matrix(len(X), len(Y))
    return float(np.sum(K * L))  # tr(K L) for symmetric L


@dataclass(frozen=True)
class TcaModel:
    bank: np.ndarray  # (m + n, M) source samples first
    kernel: KernelSpec
    W: np.ndarray  # (m + n, d)
    eigenvalues: np.ndarray  # (d,) non-increasing
    mu: float
    m: int
    n: int

    def __post_init__(self):
        # a fixed memory layout keeps einsum's summation order, and so the
        # latent coordinates, identical across copies of the model
        for name in ("bank", "W", "eigenvalues"):
            arr = np.array(getattr(self, name), dtype=float, order="C")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def d(self) -> int:
        return self.W.shape[1]

    def transform(self, P) -> np.ndarray:
        """Latent coordinates of every row of ``P``; shape (k, d)."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if P.shape[1] != self.bank.shape[1]:
            raise ArgumentError(
                f"point length {P.shape[1]} does not match bank length {self.bank.shape[1]}"
            )
        return np.einsum("ij,jk->ik", self.kernel.matrix(P, self.bank), self.W)

    def to_json(self) -> str:
        return json.dumps(
            {
                "bank": self.bank.tolist(),
                "kernel": self.kernel.to_dict(),
                "W": self.W.tolist(),
                "eigenvalues": self.eigenvalues.tolist(),
                "d": self.d,
                "mu": self.mu,
                "m": self.m,
                "n": self.n,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> TcaModel:
        data = json.loads(text)
        return cls(
            bank=np.asarray(data["bank"], dtype=float),
            kernel=KernelSpec(**data["kernel"]),
            W=np.asarray(data["W"], dtype=float).reshape(-1, data["d"]),
            eigenvalues=np.asarray(data["eigenvalues"], dtype=float),
            mu=float(data["mu"]),
            m=int(data["m"]),
            n=int(data["n"]),
        )


def _fix_signs(V: np.ndarray) -> np.ndarray:
    rows = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[rows, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def tca_fit(source, target, k: KernelSpec | None = None, d: int = 20, mu: float = 0.5) -> TcaModel:
    """Fit TCA on two sample banks.

    Args:
        source: (m, M) source-domain samples.
        target: (n, M) target-domain samples.
        k: kernel; ``None`` selects a Gaussian kernel with median-heuristic
            bandwidth over the concatenated bank.
        d: latent dimension, at most ``m + n``.
        mu: trade-off weight of the ``tr(W^T W)`` regulariser.

    Returns:
        The fitted model. Columns of ``W`` are unit-norm eigenvectors of
        ``(K L K + mu I)^-1 K H K`` ordered by non-increasing eigenvalue,
        each with its largest-magnitude entry positive.
    """
    Xs = np.atleast_2d(np.asarray(source, dtype=float))
    Xt = np.atleast_2d(np.asarray(target, dtype=float))
    m, n = len(Xs), len(Xt)
    if m < 1 or n < 1:
        raise ArgumentError("TCA needs at least one source and one target sample")
    if Xs.shape[1] != Xt.shape[1]:
        raise ArgumentError("source and target vectors differ in length")
    if not 1 <= d <= m + n:
        raise ArgumentError(f"latent dimension d={d} must be in [1, {m + n}]")
    if not mu > 0:
        raise ArgumentError(f"mu must be positive, got {mu}")

    bank = np.vstack([Xs, Xt])
    if k is None:
        k = KernelSpec(GAUSSIAN, median_bandwidth(bank))
    K = gram_matrix(bank, k)
    L = scaling_matrix(m, n)
    H = centering_matrix(m + n)

    KHK = K @ H @ K
    KLK_mu = K @ L @ K + mu * np.eye(m + n)
    KHK = 0.5 * (KHK + KHK.T)
    KLK_mu = 0.5 * (KLK_mu + KLK_mu.T)
    try:
        # symmetric-definite pencil: same eigenpairs as the nonsymmetric product
        vals, vecs = scipy.linalg.eigh(KHK, KLK_mu)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"TCA eigendecomposition failed: {exc}") from exc
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise NumericalError("TCA eigendecomposition returned non-finite values")

    order = np.argsort(-vals, kind="stable")[:d]
    W = vecs[:, order]
    W = W / np.linalg.norm(W, axis=0)
    W = _fix_signs(W)
    return TcaModel(bank=bank, kernel=k, W=W, eigenvalues=vals[order], mu=float(mu), m=m, n=n)


def tca_map(model: TcaModel, p) -> np.ndarray:
    """Latent vector ``W^T k_p`` of a single objective vector."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ArgumentError("tca_map takes a single vector; use TcaModel.transform for batches")
    return model.transform(p[None, :])[0]
