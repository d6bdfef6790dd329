"""Complex-parameter special functions.

Kummer's function Phi(a, c, x) = 1F1(a; c; x), Tricomi's Psi(a, c, x) = U(a, c, x)
and the complex gamma function.  All powers use the principal branch
(cut along the negative real axis).

Two evaluation regimes are used for Phi and Psi:

* ``|x| <= SWITCH_RADIUS``: the Taylor series of Phi, summed in extended
  precision when cancellation is expected; Psi from the two-Phi connection
  formula.
* ``|x| > SWITCH_RADIUS``: the two-branch large-argument series, each branch
  truncated at its smallest term.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import mpmath

from .errors import (
    DegenerateParameterError,
    InsufficientDecayError,
    NonConvergenceError,
    PoleError,
)

SWITCH_RADIUS = 30.0
SERIES_RTOL = 1e-17
MAX_TERMS = 10_000
POLE_TOL = 1e-12
INTEGER_C_TOL = 1e-9

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _near_nonpositive_integer(z: complex, tol: float) -> bool:
    n = round(z.real)
    return n <= 0 and abs(z - n) < tol


def _log_gamma_right(z: complex) -> complex:
    # Re z >= 0.5
    z = z - 1.0
    x = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma_complex(z: complex) -> complex:
    """Euler's gamma function for complex argument.

    Raises
    ------
    PoleError
        If ``z`` lies within 1e-12 of 0, -1, -2, ...
    """
    z = complex(z)
    if _near_nonpositive_integer(z, POLE_TOL):
        raise PoleError(f"gamma has a pole at {z}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return math.pi / (cmath.sin(math.pi * z) * cmath.exp(_log_gamma_right(1.0 - z)))
    return cmath.exp(_log_gamma_right(z))


def rgamma_complex(z: complex) -> complex:
    """1 / Gamma(z), equal to zero at the poles of Gamma."""
    z = complex(z)
    if _near_nonpositive_integer(z, POLE_TOL):
        return 0j
    return 1.0 / gamma_complex(z)


def cpow(x: complex, mu: complex) -> complex:
    """Principal-branch power x**mu."""
    x = complex(x)
    if x == 0:
        if complex(mu).real > 0:
            return 0j
        raise ZeroDivisionError("0 raised to a power with non-positive real part")
    return cmath.exp(complex(mu) * cmath.log(x))


# --------------------------------------------------------------------------
# Kummer Phi


def _check_c(c: complex) -> None:
    if _near_nonpositive_integer(complex(c), INTEGER_C_TOL):
        raise DegenerateParameterError(f"c = {c} is (near) a non-positive integer")


def _phi_series_double(a: complex, c: complex, x: complex) -> complex:
    term = 1.0 + 0j
    total = 1.0 + 0j
    for n in range(MAX_TERMS):
        term *= (a + n) / (c + n) * x / (n + 1)
        total += term
        if term == 0:
            return total
        if n > abs(x) + abs(a) and abs(term) < SERIES_RTOL * abs(total):
            return total
    raise NonConvergenceError(f"Kummer series did not converge for a={a}, c={c}, x={x}")


def _phi_series_mpc(a, c, x, ax: float):
    """Kummer series in the current mpmath precision (mpc in, mpc out)."""
    term = mpmath.mpc(1)
    total = mpmath.mpc(1)
    for n in range(MAX_TERMS):
        term *= (a + n) / (c + n) * x / (n + 1)
        total += term
        if term == 0:
            return total
        if n > ax and abs(term) < SERIES_RTOL * abs(total):
            return total
    raise NonConvergenceError(f"Kummer series did not converge for a={a}, c={c}, x={x}")


def _phi_series_mp(a: complex, c: complex, x: complex) -> complex:
    # terms peak near e^{|x|}; carry enough digits to absorb the cancellation
    extra = int(abs(x) / 2.3) + 6
    with mpmath.workdps(17 + extra):
        return complex(_phi_series_mpc(mpmath.mpc(a), mpmath.mpc(c), mpmath.mpc(x), abs(x) + abs(a)))


def _psi_connection_mp(a: complex, c: complex, x: complex) -> complex:
    # the two terms grow like e^{Re x} while Psi ~ x^{-a}: add digits for both
    extra = int((abs(x) + max(x.real, 0.0)) / 2.3) + 8
    with mpmath.workdps(17 + extra):
        a_, c_, x_ = mpmath.mpc(a), mpmath.mpc(c), mpmath.mpc(x)
        ax = abs(x) + abs(a) + abs(c)
        t1 = mpmath.gamma(1 - c_) * mpmath.rgamma(a_ - c_ + 1) * _phi_series_mpc(a_, c_, x_, ax)
        t2 = mpmath.gamma(c_ - 1) * mpmath.rgamma(a_) * mpmath.power(x_, 1 - c_) * _phi_series_mpc(a_ - c_ + 1, 2 - c_, x_, ax)
        return complex(t1 + t2)


def _asymptotic_sum(p: complex, q: complex, z: complex) -> tuple[complex, float, list[complex]]:
    """Sum_s (p)_s (q)_s / s! z^{-s}, truncated before the smallest term.

    Returns the sum, the modulus of the first omitted term and the list of
    coefficients (p)_s (q)_s / s! that were used.
    """
    coef = 1.0 + 0j
    coefs = [coef]
    total = 1.0 + 0j
    last = 1.0
    zinv = 1.0 / z
    power = 1.0 + 0j
    for s in range(MAX_TERMS):
        coef = coef * (p + s) * (q + s) / (s + 1)
        power = power * zinv
        term = coef * power
        mag = abs(term)
        if mag == 0.0:
            coefs.append(coef)
            return total, 0.0, coefs
        if mag >= last:
            return total, last, coefs
        coefs.append(coef)
        total += term
        last = mag
        if mag < 1e-18 * abs(total):
            return total, mag, coefs
    return total, last, coefs


def _phi_asymptotic(a: complex, c: complex, x: complex) -> complex:
    sign = 1.0 if x.imag >= 0 else -1.0
    gc = gamma_complex(c)
    s1, _, _ = _asymptotic_sum(a, a - c + 1, -x)
    s2, _, _ = _asymptotic_sum(c - a, 1 - a, x)
    alg = cmath.exp(sign * 1j * math.pi * a) * cpow(x, -a) * rgamma_complex(c - a) * s1
    expo = cmath.exp(x) * cpow(x, a - c) * rgamma_complex(a) * s2
    return gc * (alg + expo)


def kummer_phi(a: complex, c: complex, x: complex) -> complex:
    """Confluent hypergeometric function Phi(a, c, x) = 1F1(a; c; x).

    Raises
    ------
    DegenerateParameterError
        If ``c`` is within 1e-9 of a non-positive integer.
    NonConvergenceError
        If the Taylor series fails to converge within ``MAX_TERMS`` terms.
    """
    a, c, x = complex(a), complex(c), complex(x)
    _check_c(c)
    if x == 0:
        return 1.0 + 0j
    if abs(x) <= SWITCH_RADIUS:
        if abs(x) <= 4.0 and abs(a) < 50:
            return _phi_series_double(a, c, x)
        return _phi_series_mp(a, c, x)
    return _phi_asymptotic(a, c, x)


# --------------------------------------------------------------------------
# Tricomi Psi


def tricomi_psi(a: complex, c: complex, x: complex) -> complex:
    """Confluent hypergeometric function of the second kind Psi(a, c, x) = U(a, c, x).

    Only non-integer ``c`` is supported.  Inside the switch radius the
    connection formula with two Kummer functions is used, carried in extended
    precision away from the origin because its two terms cancel; outside,
    the asymptotic series in 1/x truncated at the smallest term.
    """
    a, c, x = complex(a), complex(c), complex(x)
    if abs(c.imag) < INTEGER_C_TOL and abs(c.real - round(c.real)) < INTEGER_C_TOL:
        raise DegenerateParameterError(f"integer c = {c} is not supported by tricomi_psi")
    if x == 0:
        raise PoleError("tricomi_psi is singular at x = 0")
    if abs(x) > SWITCH_RADIUS:
        s, _, _ = _asymptotic_sum(a, a - c + 1, -x)
        return cpow(x, -a) * s
    if abs(x) > 2.0 or x.real > 0.5:
        return _psi_connection_mp(a, c, x)
    t1 = gamma_complex(1 - c) * rgamma_complex(a - c + 1) * kummer_phi(a, c, x)
    t2 = gamma_complex(c - 1) * rgamma_complex(a) * cpow(x, 1 - c) * kummer_phi(a - c + 1, 2 - c, x)
    return t1 + t2


# --------------------------------------------------------------------------
# Large-argument expansions


@dataclass(frozen=True)
class AsymptoticExpansion:
    """``leading * carrier(r) * (1 + correction_1_over_r / r + O(r^-2))``.

    ``carrier`` holds the r-dependent oscillatory / power factor (for example
    ``exp(x) x^(a-c)``); ``leading`` is the constant amplitude.  For
    ``r >= valid_from`` the neglected part is bounded by
    ``remainder_bound / r**2`` relative to ``leading * carrier(r)``.
    ``coefficients`` carries the full series (1, c_1, c_2, ...) in powers of
    ``1/r`` so callers can evaluate beyond first order.
    """

    leading: complex
    correction_1_over_r: complex
    remainder_bound: float
    carrier: Callable[[float], complex]
    coefficients: tuple[complex, ...] = (1.0 + 0j,)
    valid_from: float = SWITCH_RADIUS

    def first_order(self, r: float) -> complex:
        return self.leading * self.carrier(r) * (1.0 + self.correction_1_over_r / r)

    def __call__(self, r: float) -> complex:
        total = 0j
        last = math.inf
        for n, cn in enumerate(self.coefficients):
            term = cn / r**n
            if n > 1 and abs(term) >= last:
                break
            total += term
            last = abs(term) if n > 0 else last
        return self.leading * self.carrier(r) * total


@dataclass(frozen=True)
class KummerAsymptotics:
    """Both branches of Phi(a, c, rho * direction) for large rho."""

    algebraic: AsymptoticExpansion
    exponential: AsymptoticExpansion

    def __call__(self, rho: float) -> complex:
        return self.algebraic(rho) + self.exponential(rho)


def _remainder_bound(coefs: list[complex], scale: complex, radius: float) -> float:
    # sum_{s>=2} |c_s| |scale|^s radius^(2-s), coefficients of 1/rho
    total = 0.0
    for s in range(2, len(coefs)):
        total += abs(coefs[s]) * abs(scale) ** s * radius ** (2 - s)
    return total


def phi_large_x(
    a: complex,
    c: complex,
    direction: complex,
    tol: float = 1e-9,
    radius: float = SWITCH_RADIUS,
) -> KummerAsymptotics:
    """Large-|x| expansion of Phi(a, c, x) along the ray ``x = rho * direction``.

    The algebraic branch carries ``x^(-a)``, the exponential branch
    ``exp(x) x^(a-c)``.  Raises ``InsufficientDecayError`` when the
    second-order remainder at ``rho = radius`` exceeds ``tol``.
    """
    a, c = complex(a), complex(c)
    d = complex(direction)
    if abs(abs(d) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit complex number")
    _check_c(c)
    sign = 1.0 if d.imag >= 0 else -1.0
    gc = gamma_complex(c)
    x0 = radius * d
    _, err1, coefs1 = _asymptotic_sum(a, a - c + 1, -x0)
    _, err2, coefs2 = _asymptotic_sum(c - a, 1 - a, x0)
    # series in 1/rho: (-x)^{-s} = (-d)^{-s} rho^{-s}
    c1 = tuple(cf * (-1.0 / d) ** s for s, cf in enumerate(coefs1))
    c2 = tuple(cf * (1.0 / d) ** s for s, cf in enumerate(coefs2))
    lead1 = gc * cmath.exp(sign * 1j * math.pi * a) * rgamma_complex(c - a)
    lead2 = gc * rgamma_complex(a)
    rb1 = _remainder_bound(list(c1), 1.0, radius)
    rb2 = _remainder_bound(list(c2), 1.0, radius)
    worst = max(err1 if lead1 != 0 else 0.0, err2 if lead2 != 0 else 0.0)
    if worst > tol:
        raise InsufficientDecayError(
            f"asymptotic series of Phi({a}, {c}, .) cannot reach tol={tol} at radius {radius}"
        )
    alg = AsymptoticExpansion(
        leading=lead1,
        correction_1_over_r=c1[1] if len(c1) > 1 else 0j,
        remainder_bound=rb1,
        carrier=lambda rho, d=d, a=a: cpow(rho * d, -a),
        coefficients=c1,
        valid_from=radius,
    )
    expo = AsymptoticExpansion(
        leading=lead2,
        correction_1_over_r=c2[1] if len(c2) > 1 else 0j,
        remainder_bound=rb2,
        carrier=lambda rho, d=d, a=a, c=c: cmath.exp(rho * d) * cpow(rho * d, a - c),
        coefficients=c2,
        valid_from=radius,
    )
    return KummerAsymptotics(alg, expo)
