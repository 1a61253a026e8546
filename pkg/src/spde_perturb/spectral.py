"""Dirichlet sine eigenbases on intervals and coefficient/grid transforms.

Everything lives on an interval (0, L) with homogeneous Dirichlet conditions.
The negative Laplacian there has eigenvalues (n*pi/L)**2 and orthonormal
eigenfunctions sqrt(2/L)*sin(n*pi*x/L); a function is represented either by
its first N eigenbasis coefficients (:class:`SpectralVec`) or by its values
on M uniform interior nodes (:class:`GridVec`). The two representations are
connected by an exactly invertible discrete sine transform pair whenever
M >= N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainMismatchError

__all__ = [
    "DirichletDomain",
    "SpectralVec",
    "GridVec",
    "eigenpair",
    "to_grid",
    "from_grid",
    "inner",
    "norm",
    "grid_nodes",
    "synthesis_matrix",
    "analysis_matrix",
]


@dataclass(frozen=True)
class DirichletDomain:
    """Interval (0, length) with its first `n_modes` Dirichlet eigenpairs."""

    length: float
    n_modes: int

    def __post_init__(self):
        if not (self.length > 0):
            raise ValueError(f"domain length must be positive, got {self.length}")
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {self.n_modes}")

    def eigenvalue(self, n: int) -> float:
        self._check_index(n)
        return (n * np.pi / self.length) ** 2

    def eigenvalues(self) -> np.ndarray:
        n = np.arange(1, self.n_modes + 1)
        return (n * np.pi / self.length) ** 2

    def eigenfunction(self, n: int):
        self._check_index(n)
        amp = np.sqrt(2.0 / self.length)
        freq = n * np.pi / self.length

        def phi(x):
            return amp * np.sin(freq * np.asarray(x))

        return phi

    def _check_index(self, n: int) -> None:
        if not 1 <= n <= self.n_modes:
            raise IndexError(f"mode index {n} outside 1..{self.n_modes}")

    def zero_vec(self) -> "SpectralVec":
        return SpectralVec(self, np.zeros(self.n_modes))

    def basis_vec(self, n: int) -> "SpectralVec":
        self._check_index(n)
        c = np.zeros(self.n_modes)
        c[n - 1] = 1.0
        return SpectralVec(self, c)


def eigenpair(domain: DirichletDomain, n: int):
    """Return (eigenvalue, eigenfunction handle) for mode n (1-based)."""
    return domain.eigenvalue(n), domain.eigenfunction(n)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpectralVec:
    """Truncated eigenbasis coefficients of an L2 function on one domain."""

    domain: DirichletDomain
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _freeze(self.coeffs))
        if self.coeffs.shape != (self.domain.n_modes,):
            raise ValueError(
                f"expected {self.domain.n_modes} coefficients, got {self.coeffs.shape}"
            )

    def __add__(self, other: "SpectralVec") -> "SpectralVec":
        _require_same_domain(self, other)
        return SpectralVec(self.domain, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralVec") -> "SpectralVec":
        _require_same_domain(self, other)
        return SpectralVec(self.domain, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralVec":
        return SpectralVec(self.domain, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class GridVec:
    """Values on the M uniform interior nodes x_j = j*L/(M+1), j = 1..M."""

    domain: DirichletDomain
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("grid values must be a nonempty 1-d array")

    @property
    def n_points(self) -> int:
        return self.values.size


def _require_same_domain(u, v) -> None:
    if u.domain != v.domain:
        raise DomainMismatchError(
            f"operands live on different domains: {u.domain} vs {v.domain}"
        )


def grid_nodes(domain: DirichletDomain, m: int) -> np.ndarray:
    """Uniform interior nodes; endpoints are excluded so the boundary
    condition is structural."""
    j = np.arange(1, m + 1)
    return j * domain.length / (m + 1)


@lru_cache(maxsize=64)
def _transform_matrices(length: float, n: int, m: int):
    # synthesis S[j, k] = phi_{k+1}(x_{j+1}); analysis = (L/(M+1)) S^T.
    # Discrete sine orthogonality makes analysis @ synthesis the identity
    # for any m >= n.
    j = np.arange(1, m + 1)[:, None]
    k = np.arange(1, n + 1)[None, :]
    synth = np.sqrt(2.0 / length) * np.sin(np.pi * j * k / (m + 1))
    analysis = (length / (m + 1)) * synth.T
    return _freeze(synth), _freeze(analysis)


def synthesis_matrix(domain: DirichletDomain, m: int) -> np.ndarray:
    """M x N matrix evaluating a coefficient vector on the interior grid."""
    if m < domain.n_modes:
        raise ValueError(f"need at least {domain.n_modes} grid points, got {m}")
    return _transform_matrices(domain.length, domain.n_modes, m)[0]


def analysis_matrix(domain: DirichletDomain, m: int) -> np.ndarray:
    """N x M matrix recovering coefficients from interior grid values."""
    if m < domain.n_modes:
        raise ValueError(f"need at least {domain.n_modes} grid points, got {m}")
    return _transform_matrices(domain.length, domain.n_modes, m)[1]


def to_grid(v: SpectralVec, m: int) -> GridVec:
    """Evaluate coefficients on the M-point interior grid (type-I DST)."""
    return GridVec(v.domain, synthesis_matrix(v.domain, m) @ v.coeffs)


def from_grid(g: GridVec, n: int | None = None) -> SpectralVec:
    """Recover the first N coefficients from interior grid values.

    Exact inverse of :func:`to_grid` whenever the grid has at least N
    points; content above the grid's Nyquist mode aliases onto low modes.
    """
    domain = g.domain
    if n is None:
        n = domain.n_modes
    if n != domain.n_modes:
        domain = DirichletDomain(domain.length, n)
    if g.n_points < n:
        raise ValueError(f"need at least {n} grid points, got {g.n_points}")
    return SpectralVec(domain, analysis_matrix(domain, g.n_points) @ g.values)


def inner(u: SpectralVec, v: SpectralVec) -> float:
    """L2 inner product; the basis is orthonormal so it is the dot product."""
    _require_same_domain(u, v)
    return float(np.dot(u.coeffs, v.coeffs))


def norm(u: SpectralVec) -> float:
    return u.norm()
