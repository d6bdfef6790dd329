"""Pure Coulomb (q = 0) solutions of the radial Dirac system.

The system is

    f' = -k/r f + (lam + m - v) g
    g' =  k/r g + (m - lam + v) f,        v(r) = -A/r,

with gamma = sqrt(k^2 - A^2), eps = sqrt(lam^2 - m^2) and phi = A lam / eps.
Closed forms use Kummer parameters ``gamma + i phi`` (+0 / +1) for both the
regular and the irregular solution; the opposite sign does not solve the
system (see ``kummer_sign_residuals``).
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateScaleError, InvalidParametersError, SpectralGapError
from .specfun import AsymptoticExpansion, cpow, gamma_complex, kummer_phi, rgamma_complex, tricomi_psi

KUMMER_SIGN = +1
DEFAULT_GAP_FRACTION = 1e-3


@dataclass(frozen=True)
class SystemParams:
    """Physical triple (m, k, A).

    ``k = 0`` is only accepted together with ``A = 0`` and ``free=True``; that
    is the free reference problem whose operator has no centrifugal term.
    """

    m: float
    k: float
    A: float
    free: bool = False

    def __post_init__(self):
        if not self.m > 0:
            raise InvalidParametersError("m must be positive")
        if self.free:
            if self.k != 0 or self.A != 0:
                raise InvalidParametersError("the free reference problem has k = A = 0")
            return
        if self.k == 0:
            raise InvalidParametersError("k must be non-zero")
        if not abs(self.k) > abs(self.A):
            raise InvalidParametersError(f"|k| > |A| is required (k={self.k}, A={self.A})")

    @classmethod
    def free_reference(cls, m: float) -> "SystemParams":
        return cls(m=m, k=0.0, A=0.0, free=True)

    @property
    def gamma(self) -> float:
        return math.sqrt(self.k**2 - self.A**2)

    def leading_vector(self) -> np.ndarray:
        """Direction of the regular solution at r -> 0 (``[1, b0]`` when A != 0)."""
        if self.A != 0:
            return np.array([1.0, (self.gamma + self.k) / self.A])
        if self.k > 0:
            return np.array([0.0, 1.0])
        return np.array([1.0, 0.0])


class Case(enum.Enum):
    POSITIVE = "positive"  # lam > m
    NEGATIVE = "negative"  # lam < -m


@dataclass(frozen=True)
class EnergyPoint:
    lam: float
    m: float
    k: float
    A: float

    @property
    def eps(self) -> float:
        return math.sqrt(self.lam**2 - self.m**2)

    @property
    def gamma(self) -> float:
        return math.sqrt(self.k**2 - self.A**2)

    @property
    def case(self) -> Case:
        return Case.POSITIVE if self.lam > 0 else Case.NEGATIVE

    @property
    def sqrt_m_plus_lambda(self) -> complex:
        s = self.m + self.lam
        return complex(math.sqrt(s)) if s > 0 else 1j * math.sqrt(-s)

    @property
    def sqrt_m_minus_lambda(self) -> complex:
        s = self.m - self.lam
        return complex(math.sqrt(s)) if s > 0 else 1j * math.sqrt(-s)

    @property
    def beta(self) -> float:
        return (self.m - self.lam) / self.eps

    @property
    def phi(self) -> float:
        return self.A * self.lam / self.eps


def make_energy(params: SystemParams, lam: float, gap: float | None = None) -> EnergyPoint:
    if gap is None:
        gap = DEFAULT_GAP_FRACTION * params.m
    if not abs(lam) > params.m + gap:
        raise SpectralGapError(f"|lambda| = {abs(lam)} is inside the gap (m + {gap})")
    return EnergyPoint(lam=float(lam), m=params.m, k=params.k, A=params.A)


@dataclass(frozen=True)
class Spinor:
    f: complex | np.ndarray
    g: complex | np.ndarray

    def as_array(self) -> np.ndarray:
        return np.array([self.f, self.g])


def dirac_rhs(params: SystemParams, lam: float, r, Z, q=None):
    """Right-hand side of the first-order system for v = -A/r + q(r)."""
    v = -params.A / r
    if q is not None:
        v = v + q(r)
    f, g = Z[0], Z[1]
    return np.array([-params.k / r * f + (lam + params.m - v) * g, (params.m - lam + v) * f + params.k / r * g])


# --------------------------------------------------------------------------
# closed forms


def kummer_a(ep: EnergyPoint, sign: int = KUMMER_SIGN) -> complex:
    return ep.gamma + sign * 1j * ep.phi


def regular_coefficients(params: SystemParams, ep: EnergyPoint) -> tuple[complex, complex]:
    """(a1, a2) from the r -> 0 normalisation ``F0 ~ r^gamma [1, b0]``."""
    if params.A == 0:
        raise InvalidParametersError("closed-form Coulomb solutions need A != 0")
    b0 = (ep.gamma + params.k) / params.A
    s = 1.0 / ep.sqrt_m_plus_lambda
    d = b0 / ep.sqrt_m_minus_lambda
    return (s - d) / 2, (s + d) / 2


def regular_solution(params: SystemParams, ep: EnergyPoint, r: float, sign: int = KUMMER_SIGN) -> Spinor:
    """Regular solution F0 = [f0, g0], normalised as r^gamma [1, b0] at the origin."""
    a1, a2 = regular_coefficients(params, ep)
    a = kummer_a(ep, sign)
    c = 2 * ep.gamma + 1
    x = 2j * ep.eps * r
    q1 = a1 * kummer_phi(a, c, x)
    q2 = a2 * kummer_phi(a + 1, c, x)
    pre = cmath.exp(-1j * ep.eps * r) * r**ep.gamma
    return Spinor(ep.sqrt_m_plus_lambda * pre * (q1 + q2), -ep.sqrt_m_minus_lambda * pre * (q1 - q2))


def irregular_coefficients(params: SystemParams, ep: EnergyPoint) -> tuple[complex, complex]:
    """(b1, b2) with b1 = 1.

    The small-r condition is imposed on the Gamma-weighted amplitudes
    ``b1 / Gamma(a)`` and ``b2 / Gamma(a + 1)``, which are the actual
    coefficients of r^-gamma in Psi(a, c, 2 i eps r).
    """
    if params.A == 0:
        raise InvalidParametersError("closed-form Coulomb solutions need A != 0")
    a = kummer_a(ep)
    sp, sm = ep.sqrt_m_plus_lambda, ep.sqrt_m_minus_lambda
    num = sp * (params.k - ep.gamma) + params.A * sm
    den = sp * (params.k - ep.gamma) - params.A * sm
    scale = max(abs(num), abs(den))
    if abs(den) > 1e-12 * scale:
        weighted_b2 = -rgamma_complex(a) * num / den
        return 1.0 + 0j, weighted_b2 * gamma_complex(a + 1)
    if abs(num) < 1e-12 * scale:
        raise DegenerateScaleError("small-r relation for the irregular solution is degenerate")
    # b2 = 1 pivot
    weighted_b1 = -rgamma_complex(a + 1) * den / num
    return weighted_b1 * gamma_complex(a), 1.0 + 0j


def irregular_small_r_amplitudes(params: SystemParams, ep: EnergyPoint) -> tuple[complex, complex]:
    """Effective (B1, B2) such that G0 r^gamma -> C [sp (B1 + B2), -sm (B1 - B2)]."""
    b1, b2 = irregular_coefficients(params, ep)
    a = kummer_a(ep)
    return b1 * rgamma_complex(a), b2 * rgamma_complex(a + 1)


def irregular_solution(params: SystemParams, ep: EnergyPoint, r: float) -> Spinor:
    """Solution singular at the origin (~ r^-gamma), decaying phase e^{-i eps r} at infinity."""
    b1, b2 = irregular_coefficients(params, ep)
    a = kummer_a(ep)
    c = 2 * ep.gamma + 1
    x = 2j * ep.eps * r
    p1 = b1 * tricomi_psi(a, c, x)
    p2 = b2 * tricomi_psi(a + 1, c, x)
    pre = cmath.exp(-1j * ep.eps * r) * r**ep.gamma
    return Spinor(ep.sqrt_m_plus_lambda * pre * (p1 + p2), -ep.sqrt_m_minus_lambda * pre * (p1 - p2))


@dataclass(frozen=True)
class FundamentalMatrix:
    r: float
    entries: np.ndarray = field(repr=False)

    @property
    def det(self) -> complex:
        e = self.entries
        return e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]

    def adjugate(self) -> np.ndarray:
        e = self.entries
        return np.array([[e[1, 1], -e[0, 1]], [-e[1, 0], e[0, 0]]])


def fundamental_matrix(params: SystemParams, ep: EnergyPoint, r: float) -> FundamentalMatrix:
    F0 = regular_solution(params, ep, r)
    G0 = irregular_solution(params, ep, r)
    return FundamentalMatrix(r=r, entries=np.array([[F0.f, G0.f], [F0.g, G0.g]], dtype=complex))


def wronskian_constant(params: SystemParams, ep: EnergyPoint) -> complex:
    """M_d = det D, evaluated from the r -> 0 limits of both columns."""
    c = 2 * ep.gamma + 1
    x_scale = (2j * ep.eps) ** (1 - c)
    B1, B2 = irregular_small_r_amplitudes(params, ep)
    pref = gamma_complex(c - 1) * x_scale
    sp, sm = ep.sqrt_m_plus_lambda, ep.sqrt_m_minus_lambda
    g_lead = np.array([sp * pref * (B1 + B2), -sm * pref * (B1 - B2)])
    f_lead = params.leading_vector()
    return complex(f_lead[0] * g_lead[1] - f_lead[1] * g_lead[0])


# --------------------------------------------------------------------------
# large-r forms


@dataclass(frozen=True)
class JostSeries:
    """Formal large-r series ``e^{-i eps r} r^sigma sum_n v_n r^-n`` of the
    pure Coulomb Jost solution, normalised so that v_0 = [sqrt(m+lam), -sqrt(m-lam)].
    """

    eps: float
    sigma: complex
    coefficients: np.ndarray  # shape (N, 2)

    def envelope(self, r):
        """sum_n v_n r^-n truncated at the smallest term, shape (2, len(r))."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        v = self.coefficients
        n = np.arange(len(v))[:, None]
        terms = v[:, :, None] * (r[None, None, :] ** -n[:, :, None].astype(float))
        mags = np.linalg.norm(terms, axis=1)  # (N, R)
        # stop before the first term that does not decrease
        grow = np.zeros_like(mags, dtype=bool)
        grow[1:] = mags[1:] >= mags[:-1]
        grow[1:] |= grow[:-1].cumsum(axis=0) > 0
        # include terms while no growth has been seen
        keep = ~(np.cumsum(grow, axis=0) > 0)
        return np.sum(terms * keep[:, None, :], axis=0)

    def truncation_error(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        v = self.coefficients
        mags = np.array([np.linalg.norm(vn) * r ** -float(i) for i, vn in enumerate(v)])
        return mags.min(axis=0)

    def __call__(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        phase = np.exp(-1j * self.eps * r + self.sigma * np.log(r))
        return self.envelope(r) * phase[None, :]


def jost_series(params: SystemParams, ep: EnergyPoint, order: int = 60) -> JostSeries:
    """Coefficients of the asymptotic Jost solution built directly from the ODE."""
    lam, m, eps = ep.lam, params.m, ep.eps
    A0 = np.array([[0.0, lam + m], [m - lam, 0.0]], dtype=complex)
    A1 = np.array([[-params.k, params.A], [-params.A, params.k]], dtype=complex)
    v0 = np.array([ep.sqrt_m_plus_lambda, -ep.sqrt_m_minus_lambda])
    ell = np.array([m - lam, -1j * eps])  # left null vector of A0 + i eps
    lv0 = ell @ v0
    sigma = (ell @ (A1 @ v0)) / lv0
    coefs = [v0]
    w_prev = v0.copy()
    ident = np.eye(2)
    for n in range(1, order):
        rhs = ((sigma - (n - 1)) * ident - A1) @ w_prev
        w = np.array([0.0, rhs[0] / (lam + m)], dtype=complex)
        # fix the free v0-component of w from solvability at the next order
        p = (ell @ (((sigma - n) * ident - A1) @ w)) / (n * lv0)
        w = w + p * v0
        coefs.append(w)
        w_prev = w
    return JostSeries(eps=eps, sigma=complex(sigma), coefficients=np.array(coefs))


def jost_free(params: SystemParams, ep: EnergyPoint, r) -> np.ndarray:
    """Pure Coulomb Jost solution Phi_0(r), shape (2, len(r)); valid for eps r >> 1."""
    return jost_series(params, ep)(r)


def irregular_to_jost_scale(params: SystemParams, ep: EnergyPoint) -> complex:
    """Constant s with Phi_0 = s * G0 (G0 the Psi-based irregular solution)."""
    b1, _ = irregular_coefficients(params, ep)
    two_i_eps = 2j * ep.eps
    amp = b1 * cpow(two_i_eps, -ep.gamma) * cpow(two_i_eps, -1j * ep.phi)
    return 1.0 / amp


class Which(enum.Enum):
    REGULAR = "regular"
    IRREGULAR = "irregular"


def coulomb_large_r(params: SystemParams, ep: EnergyPoint, which: Which) -> tuple[AsymptoticExpansion, AsymptoticExpansion]:
    """Large-r expansions of the upper and lower components.

    IRREGULAR: each component is ``leading * e^{-i eps r} (2 i eps r)^{-i phi} (1 + M/r)``
    (M_phi, M_psi).  REGULAR: the incoming ``e^{-i eps r} r^{-i phi}`` half of
    ``f0`` and ``g0``; the full real solution is twice its real part.
    """
    a = kummer_a(ep)
    c = 2 * ep.gamma + 1
    eps = ep.eps
    sp, sm = ep.sqrt_m_plus_lambda, ep.sqrt_m_minus_lambda
    v = jost_series(params, ep).coefficients
    series_f = tuple(complex(x) for x in v[:, 0] / v[0, 0])
    series_g = tuple(complex(x) for x in v[:, 1] / v[0, 1])
    if which is Which.IRREGULAR:
        b1, b2 = irregular_coefficients(params, ep)
        base = -a * (a - c + 1) / (2j * eps)
        ratio = b2 / b1 / (2j * eps)
        M_phi, M_psi = base + ratio, base - ratio
        amp = b1 * cpow(2j * eps, -ep.gamma)
        carrier = lambda r, eps=eps, phi=ep.phi: cmath.exp(-1j * eps * r) * cpow(2j * eps * r, -1j * phi)
        bound = abs(a * (a + 1) * (a - c + 1) * (a - c + 2)) / (2 * (2 * eps) ** 2) + abs(b2 / b1) * abs((a + 1) * (a - c + 2)) / (2 * eps) ** 2
        return (
            AsymptoticExpansion(sp * amp, M_phi, bound, carrier, series_f),
            AsymptoticExpansion(-sm * amp, M_psi, bound, carrier, series_g),
        )
    # regular: Phi(a, c, x) algebraic branch gives e^{-i eps r} r^{-i phi}
    a1, a2 = regular_coefficients(params, ep)
    two_i_eps = 2j * eps
    gc = gamma_complex(c)
    # e^{-i eps r} r^gamma * Gamma(c) e^{i pi a} (2 i eps r)^{-a} / Gamma(c - a)
    amp1 = a1 * gc * cmath.exp(1j * math.pi * a) * cpow(two_i_eps, -a) * rgamma_complex(c - a)
    amp2 = a2 * gc * cmath.exp(1j * math.pi * (a + 1)) * cpow(two_i_eps, -a - 1) * rgamma_complex(c - a - 1)
    # first coefficient of the algebraic series S(a, a - c + 1, -x) in 1/r;
    # the a+1 term carries one extra power of 1/r and folds into the correction
    m1 = a * (a - c + 1) / (-two_i_eps)
    m2 = (a + 1) * (a - c + 2) / (-two_i_eps)
    carrier = lambda r, eps=eps, phi=ep.phi: cmath.exp(-1j * eps * r) * cpow(r, -1j * phi)
    Mf = m1 + amp2 / amp1
    Mg = m1 - amp2 / amp1
    bound = abs(m1 * (a + 1) * (a - c + 2) / (-2 * two_i_eps)) + abs(m2 * amp2 / amp1)
    return (
        AsymptoticExpansion(sp * amp1, Mf, bound, carrier, series_f),
        AsymptoticExpansion(-sm * amp1, Mg, bound, carrier, series_g),
    )


def kummer_sign_residuals(params: SystemParams, ep: EnergyPoint, radii=(0.7, 3.0, 9.0), h: float = 1e-3) -> dict[int, float]:
    """Max relative ODE residual of the regular closed form for each Kummer sign."""
    out = {}
    for sign in (+1, -1):
        worst = 0.0
        for r in radii:
            fun = lambda rr: regular_solution(params, ep, rr, sign).as_array()
            d = (-fun(r + 2 * h) + 8 * fun(r + h) - 8 * fun(r - h) + fun(r - 2 * h)) / (12 * h)
            res = np.linalg.norm(d - dirac_rhs(params, ep.lam, r, fun(r))) / np.linalg.norm(fun(r))
            worst = max(worst, float(res))
        out[sign] = worst
    return out
