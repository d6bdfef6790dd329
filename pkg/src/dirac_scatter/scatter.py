"""Asymptotic coefficients, the stationary scattering matrix and the
stationary deviation factor.

At large r the regular solution is a real combination of the Jost
solution and its conjugate,

    F = alpha Phi + conj(alpha) conj(Phi),
    Phi ~ e^{-i eps r} V0(r)^{-1} [sqrt(m+lam), -sqrt(m-lam)],

so that ``F ~ (1/2i) (e^{i eps r} V0 C2 - e^{-i eps r} V0^{-1} C1)`` with
``C1 = -2i alpha v0`` and ``C2 = conj(C1)``.  ``alpha`` is obtained from
r-independent Wronskians; an oscillatory least-squares fit over a window
is the cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import coulomb, perturb
from .coulomb import EnergyPoint, SystemParams
from .errors import ConjugacyViolation, FitError, ZeroCoefficientError
from .perturb import PerturbationSpec, SolutionGrid

ZERO_COEFF_TOL = 1e-12
CONJUGACY_TOL = 1e-4
FIT_RESIDUAL_TOL = 1e-3


def rho1(sigma: float, m: float) -> float:
    """Free spectral density (1/pi) sqrt(|(sigma+m)/(sigma-m)|)."""
    from .errors import SpectralGapError

    if not abs(sigma) > m:
        raise SpectralGapError(f"|sigma| = {abs(sigma)} must exceed m = {m}")
    return math.sqrt(abs((sigma + m) / (sigma - m))) / math.pi


# --------------------------------------------------------------------------
# deviation factor


@dataclass(frozen=True)
class DeviationFactorStationary:
    """V0(r) = exp{-i (lam/eps) int_a^r v(u) du} for v = -A/r + q.

    With ``q=None`` only the Coulomb tail enters and V0 = (r/a)^{i A lam/eps}
    exactly.  The factor takes no angular parameter ``k``.
    """

    lam: float
    m: float
    A: float
    q: PerturbationSpec | None = None
    a: float = 1.0

    @property
    def eps(self) -> float:
        return math.sqrt(self.lam**2 - self.m**2)

    @property
    def phi(self) -> float:
        return self.A * self.lam / self.eps

    def _q_integral(self, r: float) -> float:
        q = self.q
        if q is None or q.is_zero:
            return 0.0
        if q.kind == "exp_decay":
            return q.c / q.alpha * (math.exp(-q.alpha * self.a) - math.exp(-q.alpha * r))
        lo, hi = sorted((self.a, r))
        sign = 1.0 if r >= self.a else -1.0
        end = min(hi, q.support_end)
        if end <= lo:
            return 0.0
        pts = [p for p in (q.r0 - q.width, q.r0 + q.width) if lo < p < end] if q.kind == "compact_bump" else None
        val = integrate.quad(lambda u: float(q(u)), lo, end, points=pts, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
        return sign * val

    def log_phase(self, r) -> np.ndarray:
        """arg V0(r) (unwrapped)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        coul = self.phi * np.log(r / self.a)
        if self.q is None or self.q.is_zero:
            return coul
        qi = np.array([self._q_integral(float(x)) for x in r])
        return coul - self.lam / self.eps * qi

    def __call__(self, r):
        out = np.exp(1j * self.log_phase(r))
        return out if np.ndim(r) else complex(out[0])

    def limit_offset(self) -> float:
        """chi = lim_{r->inf} (arg V0(r) - phi ln r)."""
        base = -self.phi * math.log(self.a)
        if self.q is None or self.q.is_zero:
            return base
        R = perturb.select_r_infinity(self.q, tol=1e-14) if self.q.kind != "custom" else self.q.support_end
        return base - self.lam / self.eps * self._q_integral(R)


def deviation_factor(ep: EnergyPoint, q: PerturbationSpec | None, a: float, r) -> complex | np.ndarray:
    """Convenience wrapper around :class:`DeviationFactorStationary`."""
    return DeviationFactorStationary(ep.lam, ep.m, ep.A, q, a)(r)


# --------------------------------------------------------------------------
# coefficient extraction


@dataclass(frozen=True)
class ScatteringData:
    """Asymptotic data at one energy.

    ``c1`` and ``c2`` belong to the eigenfunction normalised to unit
    asymptotic amplitude (``|c1[0]| = 1``), which is the normalisation used
    by the spectral transform; ``raw_amplitude`` is ``|c_{1,1}|`` of the
    regular solution normalised as ``r^gamma [1, b0]`` at the origin.
    """

    lam: float
    m: float
    c1: np.ndarray
    c2: np.ndarray
    s_matrix: np.ndarray
    omega: complex
    rho: float
    raw_amplitude: float
    alpha: complex
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def s11(self) -> complex:
        return complex(self.s_matrix[0, 0])

    @property
    def s21(self) -> complex:
        return complex(self.s_matrix[1, 1])

    @property
    def omega_imag_ratio(self) -> float:
        return abs(self.omega.imag) / abs(self.omega)

    @property
    def rho_unnormalized(self) -> float:
        """Spectral weight for the r^gamma [1, b0]-normalised regular solution."""
        return rho1(self.lam, self.m) / self.raw_amplitude**2


def wronskian(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """det[u, w] for spinor arrays of shape (2, ...)."""
    return u[0] * w[1] - u[1] * w[0]


def alpha_from_wronskian(F: np.ndarray, Phi: np.ndarray) -> np.ndarray:
    """alpha in F = alpha Phi + conj(alpha) conj(Phi), per sample."""
    return wronskian(F, np.conj(Phi)) / wronskian(Phi, np.conj(Phi))


def _coefficients(ep: EnergyPoint, alpha: complex, chi: float) -> np.ndarray:
    v0 = np.array([ep.sqrt_m_plus_lambda, -ep.sqrt_m_minus_lambda])
    return -2j * alpha * np.exp(-1j * chi) * v0


def window_fit(F: SolutionGrid, ep: EnergyPoint, V0: DeviationFactorStationary, window: tuple[float, float], n: int = 240) -> tuple[np.ndarray, float]:
    """Least-squares fit of F = (1/2i)(e^{i eps r} V0 C2 - e^{-i eps r} V0^{-1} C1)
    including 1/r and 1/r^2 envelope corrections.  Returns (C1, relative residual)."""
    lo, hi = window
    if F.dense is None or hi > F.radii[-1] * (1 + 1e-12):
        raise FitError(f"fit window {window} outside the solution range")
    if (hi - lo) * ep.eps < 4 * math.pi:
        raise FitError("fit window covers fewer than two oscillations")
    r = np.linspace(lo, hi, n)
    vals = F.dense(r)
    out_w = np.exp(1j * ep.eps * r) * V0(r)
    in_w = np.exp(-1j * ep.eps * r) / V0(r)
    basis = np.stack([out_w, out_w / r, out_w / r**2, in_w, in_w / r, in_w / r**2], axis=1) / 2j
    C1 = np.empty(2, dtype=complex)
    worst = 0.0
    for c in range(2):
        coef, *_ = np.linalg.lstsq(basis, vals[c], rcond=None)
        C1[c] = -coef[3]
        worst = max(worst, float(np.linalg.norm(basis @ coef - vals[c]) / np.linalg.norm(vals[c])))
    return C1, worst


def extract_coefficients(F: SolutionGrid, Phi: SolutionGrid, ep: EnergyPoint, V0: DeviationFactorStationary, windows=None, check_fit: bool = True) -> ScatteringData:
    """Asymptotic coefficients from the regular solution F and the Jost solution Phi.

    ``alpha`` is the median over the overlapping radii of
    det[F, conj Phi] / det[Phi, conj Phi]; ``C1 = -2i alpha e^{-i chi} v0``
    where ``chi`` is the asymptotic offset of V0 relative to r^{i phi}.
    """
    lo = max(F.radii[0], Phi.radii[0], 1.0)
    hi = min(F.radii[-1], Phi.radii[-1])
    r = np.linspace(lo, hi, 200)
    a_samples = alpha_from_wronskian(F.dense(r), Phi.dense(r))
    alpha = complex(np.median(a_samples.real) + 1j * np.median(a_samples.imag))
    spread = float(np.max(np.abs(a_samples - alpha)) / abs(alpha))
    chi = V0.limit_offset()
    c1_raw = _coefficients(ep, alpha, chi)
    raw = abs(c1_raw[0])
    if raw < ZERO_COEFF_TOL:
        raise ZeroCoefficientError("c_{1,1} vanishes")
    diag = {"alpha_spread": spread, "chi": chi}
    if check_fit:
        if windows is None:
            span = F.radii[-1]
            windows = [(span * 0.4, span * 0.6), (span * 0.6, span * 0.8), (span * 0.8, span)]
        fits = []
        for w in windows:
            C1_fit, res = window_fit(F, ep, V0, w)
            if res > FIT_RESIDUAL_TOL:
                raise FitError(f"window fit residual {res:.2e} in window {w}")
            fits.append((C1_fit, res))
        diag["window_c1"] = [f[0] for f in fits]
        diag["window_residuals"] = [f[1] for f in fits]
        diag["window_agreement"] = max(float(np.max(np.abs(f[0] - c1_raw)) / raw) for f in fits)
    c1 = c1_raw / raw
    c2 = np.conj(c1)
    if np.max(np.abs(c2 - np.conj(c1))) > CONJUGACY_TOL:
        raise ConjugacyViolation("C2 differs from conj(C1)")
    sd_tmp = (c1, c2)
    S = _s_from_coefficients(*sd_tmp)
    return ScatteringData(
        lam=ep.lam, m=ep.m, c1=c1, c2=c2, s_matrix=S, omega=-2j * alpha, rho=rho1(ep.lam, ep.m) / abs(c1[0]),
        raw_amplitude=raw, alpha=alpha, diagnostics=diag,
    )


def _s_from_coefficients(c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    if abs(c1[0]) < ZERO_COEFF_TOL:
        raise ZeroCoefficientError("c_{1,1} vanishes")
    s11 = c1[0] / np.conj(c1[0])
    s21 = c1[1] / np.conj(c1[1])
    return np.diag([s11, s21])


def stationary_s_matrix(sd: ScatteringData) -> np.ndarray:
    """diag(s11, s21) with s_{n,1} = c_{n,1} / conj(c_{n,1})."""
    return _s_from_coefficients(sd.c1, sd.c2)


def spectral_density_perturbed(sd: ScatteringData) -> float:
    """rho = rho1(lam) / |c_{1,1}| for the unit-amplitude eigenfunction."""
    c = abs(sd.c1[0])
    if c < ZERO_COEFF_TOL:
        raise ZeroCoefficientError("c_{1,1} vanishes")
    return rho1(sd.lam, sd.m) / c


def free_reference_data(m: float, lam: float) -> ScatteringData:
    """Coefficients of the free eigenfunction [cos eps r, beta sin eps r].

    Obtained from the Wronskian decomposition against
    Phi = e^{-i eps r} [sqrt(m+lam), -sqrt(m-lam)].
    """
    params = SystemParams.free_reference(m)
    ep = coulomb.make_energy(params, lam)
    r = np.linspace(1.0, 10.0, 50)
    F = np.array([np.cos(ep.eps * r), ep.beta * np.sin(ep.eps * r)], dtype=complex)
    v0 = np.array([ep.sqrt_m_plus_lambda, -ep.sqrt_m_minus_lambda])
    Phi = np.exp(-1j * ep.eps * r)[None, :] * v0[:, None]
    a = alpha_from_wronskian(F, Phi)
    alpha = complex(np.mean(a))
    c1_raw = _coefficients(ep, alpha, 0.0)
    raw = abs(c1_raw[0])
    c1 = c1_raw / raw
    S = _s_from_coefficients(c1, np.conj(c1))
    return ScatteringData(lam, m, c1, np.conj(c1), S, -2j * alpha, rho1(lam, m) / abs(c1[0]), raw, alpha,
                          {"c1_raw": c1_raw})


# --------------------------------------------------------------------------
# pipeline


def match_radius(params: SystemParams, q: PerturbationSpec, eps_min: float) -> float:
    """Radius beyond which the regular solution is written as 2 Re(alpha Phi0)."""
    return max(40.0, 35.0 / eps_min, perturb.select_r_infinity(q))


def regular_alpha(params: SystemParams, q: PerturbationSpec, lams, r_match: float | None = None) -> tuple[np.ndarray, float]:
    """alpha(lam) for the r^gamma [1, b0]-normalised regular solutions (vectorised).

    Uses the DOP853 regular solution at ``r_match`` and the pure Coulomb
    Jost series there (q is negligible beyond R_inf).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    eps = np.sqrt(lams**2 - params.m**2)
    if r_match is None:
        r_match = match_radius(params, q, float(eps.min()))
    F, _ = perturb.integrate_regular(params, lams, q, np.array([1.0, r_match]))
    F = F[:, :, -1]
    alphas = np.empty(len(lams), dtype=complex)
    for i, lam in enumerate(lams):
        ep = coulomb.EnergyPoint(lam, params.m, params.k, params.A)
        Phi = coulomb.jost_series(params, ep)(r_match)[:, 0]
        alphas[i] = alpha_from_wronskian(F[i][:, None], Phi[:, None])[0]
    return alphas, r_match


def scattering_data(params: SystemParams, q: PerturbationSpec, lam: float, V0: DeviationFactorStationary | None = None, r_max: float | None = None) -> ScatteringData:
    """Full extraction at one energy: RK regular and Jost solutions plus Wronskians."""
    ep = coulomb.make_energy(params, lam)
    if V0 is None:
        V0 = DeviationFactorStationary(lam, params.m, params.A)
    if r_max is None:
        r_max = max(120.0, 60.0 / ep.eps + perturb.select_r_infinity(q))
    radii = perturb.radial_grid(ep.eps, r_max, r_min=1e-3, per_decade=10, osc=8)
    Fv, Fd = perturb.integrate_regular(params, [lam], q, radii)
    Pv, Pd, _ = perturb.integrate_jost(params, [lam], q, radii)
    F = SolutionGrid(radii, Fv[0], "regular", lam, {}, lambda r: Fd(r)[0])
    Phi = SolutionGrid(radii, Pv[0], "jost", lam, {}, lambda r: Pd(r)[0])
    return extract_coefficients(F, Phi, ep, V0)
