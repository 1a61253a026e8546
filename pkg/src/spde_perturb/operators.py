"""Semigroups, resolvents, the zero-extension/restriction pair, and the
operator-defect norms that drive the perturbation experiments.

The generator is diagonal in each domain's sine basis, so the semigroup and
resolvent act mode-by-mode. Maps between a base interval (0, L) and a longer
interval (0, L') are realized through one cross matrix of basis inner
products: zero extension is multiplication by that matrix, restriction by its
transpose. All operator norms of such maps are largest singular values of
finite matrices, estimated by power iteration with a convergence certificate
and a doubled-truncation consistency check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatchError, TruncationError
from .spectral import DirichletDomain, SpectralVec

__all__ = [
    "semigroup_apply",
    "resolvent_apply",
    "ContourQuadrature",
    "semigroup_via_contour",
    "EmbeddingPair",
    "embed",
    "restrict",
    "OperatorNormResult",
    "operator_norm",
    "TauReport",
    "inverse_defect_norm",
    "semigroup_defect_norm",
    "SpectralRectangle",
    "spectrum_gap_check",
]

RAY_ANGLE = 3.0 * np.pi / 4.0


def semigroup_apply(domain: DirichletDomain, t: float, u: SpectralVec) -> SpectralVec:
    """Apply the heat semigroup at time t: scale mode n by exp(-lambda_n*t)."""
    if t < 0:
        raise ValueError(f"semigroup time must be >= 0, got {t}")
    if u.domain != domain:
        raise DomainMismatchError("vector does not live on the given domain")
    return SpectralVec(domain, np.exp(-domain.eigenvalues() * t) * u.coeffs)


def resolvent_apply(domain: DirichletDomain, lam: complex, u: SpectralVec) -> np.ndarray:
    """Apply (lam + A)^{-1}: divide mode n by lam + lambda_n.

    Returns complex coefficients (lam may be complex). Raises if lam is at,
    or numerically within 1e-12 of, a point -lambda_n of the spectrum.
    """
    if u.domain != domain:
        raise DomainMismatchError("vector does not live on the given domain")
    shifts = lam + domain.eigenvalues()
    if np.min(np.abs(shifts)) <= 1e-12:
        raise ValueError(f"lambda={lam} lies on (or within 1e-12 of) the spectrum")
    return u.coeffs / shifts


@dataclass(frozen=True)
class ContourQuadrature:
    """Quadrature nodes for the sectorial-contour form of the semigroup.

    The contour is the pair of rays r*exp(+-i*3pi/4), r >= 0; every node
    with r > 0 has negative real part and therefore lies in the resolvent
    set. Nodes are placed geometrically, r_k = r_max * ratio**k, and the
    weights are the trapezoid rule in log r (uniform step h = ln(1/ratio)),
    closed by a final trapezoid panel on [0, r_min].
    """

    r_max: float
    radii: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(
        cls,
        t: float,
        ratio: float = 0.85,
        r_min: float = 1e-10,
        decay_tol: float = 1e-12,
    ) -> "ContourQuadrature":
        """Nodes for a given evaluation time.

        r_max is chosen so the integrand factor |exp(lambda*t)| =
        exp(-r*t/sqrt(2)) has decayed below `decay_tol` at the outermost
        node.
        """
        if t <= 0:
            raise ValueError(f"contour form needs t > 0, got {t}")
        if not 0 < ratio < 1:
            raise ValueError(f"node ratio must be in (0, 1), got {ratio}")
        r_max = -np.log(decay_tol) / (np.sqrt(2.0) / 2.0 * t)
        h = np.log(1.0 / ratio)
        count = int(np.ceil(np.log(r_max / r_min) / h)) + 1
        radii = r_max * ratio ** np.arange(count)
        weights = h * radii.copy()
        weights[0] *= 0.5
        weights[-1] *= 0.5
        # close [0, r_min] with one trapezoid panel so the integral is not
        # truncated near the origin
        radii = np.append(radii, 0.0)
        weights = np.append(weights, radii[-2] / 2.0)
        weights[-2] += radii[-2] / 2.0
        radii.setflags(write=False)
        weights.setflags(write=False)
        return cls(r_max=float(r_max), radii=radii, weights=weights)

    @property
    def n_nodes(self) -> int:
        return self.radii.size

    def refined(self) -> "ContourQuadrature":
        """Same span with doubled node density (for self-convergence checks)."""
        h = np.log(self.radii[0] / self.radii[1])
        ratio = np.exp(-h / 2.0)
        r_min = self.radii[-2]
        hh = np.log(1.0 / ratio)
        count = int(np.ceil(np.log(self.r_max / r_min) / hh)) + 1
        radii = self.r_max * ratio ** np.arange(count)
        weights = hh * radii.copy()
        weights[0] *= 0.5
        weights[-1] *= 0.5
        radii = np.append(radii, 0.0)
        weights = np.append(weights, radii[-2] / 2.0)
        weights[-2] += radii[-2] / 2.0
        radii.setflags(write=False)
        weights.setflags(write=False)
        return ContourQuadrature(r_max=self.r_max, radii=radii, weights=weights)


def contour_semigroup_factors(
    eigenvalues: np.ndarray, t: float, quad: ContourQuadrature
) -> np.ndarray:
    """Per-mode complex quadrature of (1/2pi*i) * int exp(lam*t)/(lam+mu) dlam
    over both rays; the exact value is exp(-mu*t)."""
    lam_plus = quad.radii * np.exp(1j * RAY_ANGLE)
    phase = np.exp(1j * RAY_ANGLE)
    out = np.empty(eigenvalues.size, dtype=complex)
    for i, mu in enumerate(eigenvalues):
        upper = phase * np.exp(lam_plus * t) / (lam_plus + mu)
        # lower ray is the complex conjugate, traversed with opposite sign
        out[i] = np.sum(quad.weights * (upper - np.conj(upper))) / (2j * np.pi)
    return out


def semigroup_via_contour(
    domain: DirichletDomain,
    t: float,
    u: SpectralVec,
    quad: ContourQuadrature | None = None,
    validate: bool = True,
    rel_tol: float = 1e-6,
):
    """Semigroup action through the resolvent contour integral.

    Returns (result, diagnostics) where diagnostics carries the largest
    imaginary residue of the quadrature and, when `validate` is set, the
    relative disagreement with the diagonal spectral form. Disagreement
    beyond `rel_tol` raises a warning rather than being silently dropped.
    """
    if t <= 0:
        raise ValueError(f"contour form needs t > 0, got {t}")
    if u.domain != domain:
        raise DomainMismatchError("vector does not live on the given domain")
    if quad is None:
        quad = ContourQuadrature.build(t)
    factors = contour_semigroup_factors(domain.eigenvalues(), t, quad)
    coeffs = factors.real * u.coeffs
    result = SpectralVec(domain, coeffs)
    diagnostics = {
        "max_imag": float(np.max(np.abs(factors.imag * u.coeffs), initial=0.0)),
        "n_nodes": quad.n_nodes,
    }
    if validate:
        reference = semigroup_apply(domain, t, u)
        denom = reference.norm()
        err = float(np.linalg.norm(coeffs - reference.coeffs))
        rel = err / denom if denom > 0 else err
        diagnostics["rel_error_vs_spectral"] = rel
        if rel > rel_tol:
            warnings.warn(
                f"contour quadrature disagrees with spectral semigroup: "
                f"rel error {rel:.3e} > {rel_tol:.1e} at t={t}",
                stacklevel=2,
            )
    return result, diagnostics


def cross_matrix(base: DirichletDomain, perturbed: DirichletDomain) -> np.ndarray:
    """Matrix of inner products <extend(phi_n), psi_m> over (0, L_perturbed).

    Closed form of int_0^{L1} sin(a x) sin(b x) dx with a = n*pi/L1,
    b = m*pi/L2; zero extension contributes nothing beyond L1.
    """
    if perturbed.length < base.length:
        raise ValueError("perturbed interval must contain the base interval")
    l1, l2 = base.length, perturbed.length
    a = np.arange(1, base.n_modes + 1) * np.pi / l1
    b = np.arange(1, perturbed.n_modes + 1) * np.pi / l2
    diff = np.subtract.outer(b, a) * l1
    summ = np.add.outer(b, a) * l1
    integral = (l1 / 2.0) * (np.sinc(diff / np.pi) - np.sinc(summ / np.pi))
    return (2.0 / np.sqrt(l1 * l2)) * integral


@dataclass(frozen=True)
class EmbeddingPair:
    """Zero-extension / restriction pair between two interval spectral spaces.

    `matrix` has entry (m, n) = inner product of the zero extension of base
    mode n with perturbed mode m; extension is `matrix @ coeffs`,
    restriction is `matrix.T @ coeffs`. Composing restriction after
    extension is the identity up to the perturbed truncation tail.
    """

    base: DirichletDomain
    perturbed: DirichletDomain
    matrix: np.ndarray

    @classmethod
    def build(
        cls,
        base: DirichletDomain,
        epsilon: float,
        n_perturbed: int | None = None,
        margin: int = 16,
    ) -> "EmbeddingPair":
        """Pair for the dilation (0, L) -> (0, (1+epsilon)L).

        The perturbed truncation defaults to ceil((1+epsilon)*N) + margin so
        the embedded function is resolved by the longer interval's basis.
        """
        if epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {epsilon}")
        if n_perturbed is None:
            n_perturbed = int(np.ceil((1.0 + epsilon) * base.n_modes)) + margin
        perturbed = DirichletDomain(base.length * (1.0 + epsilon), n_perturbed)
        mat = cross_matrix(base, perturbed)
        mat.setflags(write=False)
        return cls(base=base, perturbed=perturbed, matrix=mat)

    @property
    def epsilon(self) -> float:
        return self.perturbed.length / self.base.length - 1.0

    def with_perturbed_modes(self, n_perturbed: int) -> "EmbeddingPair":
        mat = cross_matrix(self.base, DirichletDomain(self.perturbed.length, n_perturbed))
        mat.setflags(write=False)
        return EmbeddingPair(
            base=self.base,
            perturbed=DirichletDomain(self.perturbed.length, n_perturbed),
            matrix=mat,
        )


def embed(pair: EmbeddingPair, u: SpectralVec) -> SpectralVec:
    """Zero-extend a base-domain function onto the perturbed domain."""
    if u.domain != pair.base:
        raise DomainMismatchError("embed expects a vector on the base domain")
    return SpectralVec(pair.perturbed, pair.matrix @ u.coeffs)


def restrict(pair: EmbeddingPair, v: SpectralVec) -> SpectralVec:
    """Restrict a perturbed-domain function back to the base interval."""
    if v.domain != pair.perturbed:
        raise DomainMismatchError("restrict expects a vector on the perturbed domain")
    return SpectralVec(pair.base, pair.matrix.T @ v.coeffs)


@dataclass(frozen=True)
class OperatorNormResult:
    """Largest singular value estimate with its convergence certificate."""

    value: float
    iterations: int
    residual: float
    converged: bool

    def __float__(self) -> float:
        return self.value


def operator_norm(
    mat: np.ndarray,
    rel_tol: float = 1e-8,
    max_iter: int = 10_000,
) -> OperatorNormResult:
    """Largest singular value by power iteration on M^T M.

    The certificate reports the final eigen-residual ||M^T M v - s^2 v|| /
    s^2; non-convergence within the iteration cap is returned as a
    diagnostic, not raised.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2:
        raise ValueError("operator_norm expects a matrix")
    scale = np.max(np.abs(mat), initial=0.0)
    if scale == 0.0:
        return OperatorNormResult(value=0.0, iterations=0, residual=0.0, converged=True)
    # fixed seeded start vector keeps every call deterministic
    rng = np.random.default_rng(np.random.Philox(key=0x5EED0_0PERTURB & (2**64 - 1)))
    v = rng.standard_normal(mat.shape[1])
    v /= np.linalg.norm(v)
    sigma_sq = 0.0
    residual = np.inf
    for it in range(1, max_iter + 1):
        w = mat.T @ (mat @ v)
        new_sigma_sq = float(np.dot(v, w))
        wnorm = np.linalg.norm(w)
        if wnorm == 0.0:
            return OperatorNormResult(0.0, it, 0.0, True)
        residual = float(np.linalg.norm(w - new_sigma_sq * v)) / max(new_sigma_sq, 1e-300)
        done = (
            new_sigma_sq > 0
            and abs(new_sigma_sq - sigma_sq) <= rel_tol * new_sigma_sq
            and residual <= np.sqrt(rel_tol)
        )
        sigma_sq = new_sigma_sq
        v = w / wnorm
        if done:
            return OperatorNormResult(float(np.sqrt(sigma_sq)), it, residual, True)
    return OperatorNormResult(float(np.sqrt(sigma_sq)), max_iter, residual, False)


@dataclass(frozen=True)
class TauReport:
    """Operator-defect norm with its doubled-truncation consistency check."""

    value: float
    doubled_value: float
    rel_gap: float
    norm_certificate: OperatorNormResult

    def require_converged(self, tol: float = 0.01) -> float:
        if not self.norm_certificate.converged:
            raise TruncationError(
                f"power iteration did not converge (residual "
                f"{self.norm_certificate.residual:.2e})"
            )
        if self.rel_gap > tol:
            raise TruncationError(
                f"doubled-truncation check failed: values {self.value:.6e} vs "
                f"{self.doubled_value:.6e} differ by {self.rel_gap:.2%} > {tol:.0%}"
            )
        return self.value


def _inverse_defect_matrix(pair: EmbeddingPair) -> np.ndarray:
    inv_pert = 1.0 / pair.perturbed.eigenvalues()
    inv_base = 1.0 / pair.base.eigenvalues()
    return inv_pert[:, None] * pair.matrix - pair.matrix * inv_base[None, :]


def inverse_defect_norm(pair: EmbeddingPair, trunc_tol: float = 0.01) -> TauReport:
    """Norm of (inverse on perturbed) o extend - extend o (inverse on base).

    This is the quantity whose decay as epsilon -> 0 the whole perturbation
    study hinges on. Reported together with the same norm recomputed at
    doubled perturbed truncation; a gap above `trunc_tol` marks the value
    as untrusted.
    """
    res = operator_norm(_inverse_defect_matrix(pair))
    doubled = operator_norm(
        _inverse_defect_matrix(pair.with_perturbed_modes(2 * pair.perturbed.n_modes))
    )
    denom = max(doubled.value, 1e-300)
    rel_gap = abs(res.value - doubled.value) / denom if doubled.value > 0 else 0.0
    return TauReport(
        value=res.value,
        doubled_value=doubled.value,
        rel_gap=rel_gap,
        norm_certificate=res,
    )


def _semigroup_defect_matrix(pair: EmbeddingPair, t: float) -> np.ndarray:
    e_pert = np.exp(-pair.perturbed.eigenvalues() * t)
    e_base = np.exp(-pair.base.eigenvalues() * t)
    return e_pert[:, None] * pair.matrix - pair.matrix * e_base[None, :]


def semigroup_defect_norm(pair: EmbeddingPair, t: float, trunc_tol: float = 0.01) -> TauReport:
    """Norm of (semigroup on perturbed) o extend - extend o (semigroup on base)."""
    if t <= 0:
        raise ValueError(f"semigroup defect needs t > 0, got {t}")
    res = operator_norm(_semigroup_defect_matrix(pair, t))
    doubled_pair = pair.with_perturbed_modes(2 * pair.perturbed.n_modes)
    doubled = operator_norm(_semigroup_defect_matrix(doubled_pair, t))
    denom = max(doubled.value, 1e-300)
    rel_gap = abs(res.value - doubled.value) / denom if doubled.value > 0 else 0.0
    return TauReport(
        value=res.value,
        doubled_value=doubled.value,
        rel_gap=rel_gap,
        norm_certificate=res,
    )


@dataclass(frozen=True)
class SpectralRectangle:
    """Axis-aligned rectangle in the complex plane used as the compact probe set."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ValueError("rectangle bounds out of order")

    def sample(self, per_side: int = 9) -> np.ndarray:
        re = np.linspace(self.re_min, self.re_max, per_side)
        im = np.linspace(self.im_min, self.im_max, per_side)
        grid = re[:, None] + 1j * im[None, :]
        return grid.ravel()

    def contains_real(self, x: float) -> bool:
        return (
            self.re_min <= x <= self.re_max and self.im_min <= 0.0 <= self.im_max
        )


@dataclass(frozen=True)
class SpectrumGapReport:
    epsilon: float
    min_distance: float
    resolvent_sup: float
    epsilon_margin: float


def spectrum_gap_check(
    pair: EmbeddingPair, rect: SpectralRectangle, per_side: int = 17
) -> SpectrumGapReport:
    """Check that the probe rectangle stays clear of the perturbed spectrum.

    The rectangle must avoid the mirrored base spectrum {-lambda_n}. The
    report carries the distance from the rectangle to the mirrored perturbed
    spectrum, the largest sampled resolvent norm on the rectangle (equal to
    1/distance for these self-adjoint diagonal operators, up to truncation),
    and the largest dilation epsilon for which the rectangle provably stays
    clear of the full (untruncated) perturbed spectrum.
    """
    base_spec = -pair.base.eigenvalues()
    if any(rect.contains_real(s) for s in base_spec):
        raise ValueError("probe rectangle intersects the mirrored base spectrum")
    pert_spec = -pair.perturbed.eigenvalues()
    samples = rect.sample(per_side)
    # distance from each sample to the closest mirrored eigenvalue
    dists = np.abs(samples[:, None] - pert_spec[None, :])
    min_distance = float(dists.min())
    resolvent_sup = float((1.0 / dists.min(axis=1)).max())
    # the mirrored spectrum is a subset of (-inf, -lambda_1^eps]; it can
    # only enter the rectangle through the left real edge
    if rect.im_min <= 0.0 <= rect.im_max and rect.re_max < 0.0:
        eps_margin = np.pi * pair.base.length / np.sqrt(-rect.re_max) / pair.base.length - 1.0
    else:
        eps_margin = np.inf
    return SpectrumGapReport(
        epsilon=pair.epsilon,
        min_distance=min_distance,
        resolvent_sup=resolvent_sup,
        epsilon_margin=float(eps_margin),
    )
