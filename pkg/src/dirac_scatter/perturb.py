"""Solutions of the Dirac system with v(r) = -A/r + q(r).

Two independent routes are provided for each solution:

* the Volterra integral equations built on a fundamental matrix D of the
  pure Coulomb problem, solved by Picard iteration, and
* direct adaptive Runge-Kutta integration (DOP853 in the variable ln r),
  seeded by a Frobenius series at small r (regular solution) or by the
  asymptotic Jost series at large r (Jost solution).

The Runge-Kutta route is vectorised over energies and is what the
downstream transforms use; the Picard route is the cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline

from . import coulomb
from .coulomb import EnergyPoint, SystemParams
from .errors import (
    FitError,
    InvalidParametersError,
    NonConvergenceError,
    TailTruncationError,
)

J = np.array([[0.0, -1.0], [1.0, 0.0]])  # v -> v + q adds q * J to the system matrix

TAIL_TOL = 1e-10
R_CAP = 1e3
PICARD_TOL = 1e-10
PICARD_MAX_ITER = 50
CROSS_CHECK_TOL = 1e-6
FROBENIUS_RADIUS = 1e-2
FROBENIUS_TERMS = 24
SERIES_TOL = 1e-13
RK_RTOL = 1e-12
RK_ATOL = 1e-14


# --------------------------------------------------------------------------
# perturbations


@dataclass(frozen=True)
class PerturbationSpec:
    """Real short-range perturbation q(r).

    Use the constructors :meth:`zero`, :meth:`exp_decay` (``c e^{-alpha r}``),
    :meth:`compact_bump` (``c`` times a C-infinity bump of half-width
    ``width`` centred at ``r0``) or :meth:`custom` (linearly interpolated
    table, zero beyond the last node, with a declared tail bound).
    """

    kind: str
    c: float = 0.0
    alpha: float = 1.0
    r0: float = 0.0
    width: float = 1.0
    table_r: tuple[float, ...] = ()
    table_q: tuple[float, ...] = ()
    tail_bound: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "exp_decay", "compact_bump", "custom"):
            raise InvalidParametersError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "exp_decay" and not self.alpha > 0:
            raise InvalidParametersError("alpha must be positive")
        if self.kind == "compact_bump" and not (self.width > 0 and self.r0 > 0):
            raise InvalidParametersError("compact bump needs r0 > 0 and width > 0")
        if self.kind == "custom":
            r = np.asarray(self.table_r, dtype=float)
            if len(r) < 2 or len(r) != len(self.table_q):
                raise InvalidParametersError("custom table needs >= 2 (r, q) rows")
            if np.any(np.diff(r) <= 0) or r[0] < 0:
                raise InvalidParametersError("custom table radii must be non-negative and strictly increasing")
            if not np.all(np.isfinite(self.table_q)):
                raise InvalidParametersError("custom table values must be finite")
            if not self.tail_bound >= 0:
                raise InvalidParametersError("custom table needs a declared tail bound >= 0")
        first, deriv = self.integrability()
        if not (math.isfinite(first) and math.isfinite(deriv)):
            raise InvalidParametersError("perturbation violates the short-range integrability condition")

    # constructors
    @classmethod
    def zero(cls) -> "PerturbationSpec":
        return cls("zero")

    @classmethod
    def exp_decay(cls, c: float, alpha: float) -> "PerturbationSpec":
        return cls("exp_decay", c=float(c), alpha=float(alpha))

    @classmethod
    def compact_bump(cls, c: float, r0: float, width: float) -> "PerturbationSpec":
        return cls("compact_bump", c=float(c), r0=float(r0), width=float(width))

    @classmethod
    def custom(cls, r, q, tail_bound: float) -> "PerturbationSpec":
        return cls("custom", table_r=tuple(map(float, r)), table_q=tuple(map(float, q)), tail_bound=float(tail_bound))

    @classmethod
    def from_table_text(cls, text: str) -> "PerturbationSpec":
        """Parse two-column ``r q`` text whose header declares ``tail_bound``.

        Example header: ``# tail_bound = 1e-12``.
        """
        tail = None
        rows = []
        for line in text.splitlines():
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s.lstrip("#").strip()
                if body.lower().startswith("tail_bound"):
                    tail = float(body.split("=", 1)[1] if "=" in body else body.split(":", 1)[1])
                continue
            parts = s.replace(",", " ").split()
            if len(parts) != 2:
                raise InvalidParametersError(f"expected two columns, got {s!r}")
            rows.append((float(parts[0]), float(parts[1])))
        if tail is None:
            raise InvalidParametersError("custom table header must declare tail_bound")
        if not rows:
            raise InvalidParametersError("custom table is empty")
        r, q = zip(*rows)
        return cls.custom(r, q, tail)

    @classmethod
    def from_file(cls, path) -> "PerturbationSpec":
        return cls.from_table_text(Path(path).read_text(encoding="utf-8"))

    # evaluation
    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "exp_decay":
            return self.c * np.exp(-self.alpha * r)
        if self.kind == "compact_bump":
            s = (r - self.r0) / self.width
            inside = np.abs(s) < 1
            out = np.zeros_like(r)
            ss = s[inside] if out.ndim else s
            val = self.c * np.exp(1.0 - 1.0 / (1.0 - ss**2))
            if out.ndim:
                out[inside] = val
                return out
            return val if inside else out
        rr = np.asarray(self.table_r)
        return np.where(r <= rr[-1], np.interp(r, rr, self.table_q), 0.0)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind in ("exp_decay", "compact_bump") and self.c == 0)

    @property
    def support_end(self) -> float:
        if self.kind == "compact_bump":
            return self.r0 + self.width
        if self.kind == "custom":
            return self.table_r[-1]
        return math.inf

    def tail_integral(self, R: float) -> float:
        """Upper bound on the tail of int (1 + r)|q(r)| dr beyond R."""
        if self.is_zero:
            return 0.0
        if self.kind == "exp_decay":
            a = self.alpha
            return abs(self.c) * math.exp(-a * R) * ((1 + R) / a + 1 / a**2)
        if self.kind == "compact_bump":
            if R >= self.support_end:
                return 0.0
            lo = max(R, self.r0 - self.width)
            return integrate.quad(lambda r: (1 + r) * abs(float(self(r))), lo, self.support_end, limit=200)[0]
        rr = np.asarray(self.table_r)
        if R >= rr[-1]:
            return self.tail_bound
        grid = np.concatenate([[R], rr[rr > R]])
        vals = (1 + grid) * np.abs(self(grid))
        return float(integrate.trapezoid(vals, grid)) + self.tail_bound

    def integrability(self) -> tuple[float, float]:
        """(int_0^inf (1+r)|q|, int |q'| + int q^2) evaluated numerically."""
        if self.is_zero:
            return 0.0, 0.0
        if self.kind == "exp_decay":
            a, c = self.alpha, abs(self.c)
            first = integrate.quad(lambda r: (1 + r) * c * math.exp(-a * r), 0, math.inf)[0]
            return first, c + c**2 / (2 * a)
        if self.kind == "compact_bump":
            lo, hi = max(0.0, self.r0 - self.width), self.support_end
            first = integrate.quad(lambda r: (1 + r) * abs(float(self(r))), lo, hi, limit=200)[0]
            h = 1e-6 * self.width
            dq = lambda r: abs(float(self(r + h)) - float(self(r - h))) / (2 * h)
            second = integrate.quad(dq, lo, hi, limit=200)[0] + integrate.quad(lambda r: float(self(r)) ** 2, lo, hi, limit=200)[0]
            return first, second
        rr, qq = np.asarray(self.table_r), np.asarray(self.table_q)
        first = float(integrate.trapezoid((1 + rr) * np.abs(qq), rr)) + self.tail_bound
        second = float(np.sum(np.abs(np.diff(qq)))) + abs(qq[-1]) + float(integrate.trapezoid(qq**2, rr))
        return first, second

    def taylor(self, n: int, radius: float = FROBENIUS_RADIUS) -> np.ndarray:
        """Coefficients q_j of q(r) ~ sum_j q_j r^j valid on [0, radius]."""
        if self.is_zero:
            return np.zeros(n)
        if self.kind == "exp_decay":
            j = np.arange(n)
            return self.c * (-self.alpha) ** j / np.array([math.factorial(int(i)) for i in j], dtype=float)
        # local polynomial fit (exact for a linear table segment, zero for a
        # bump whose support avoids the origin)
        x = radius * (1 - np.cos(np.linspace(0, math.pi, 16))) / 2 * 2
        deg = min(6, n - 1)
        poly = np.polynomial.Polynomial.fit(x, self(x), deg).convert()
        out = np.zeros(n)
        out[: len(poly.coef)] = poly.coef[:n]
        return out


def select_r_infinity(q: PerturbationSpec, tol: float = TAIL_TOL, cap: float = R_CAP, floor: float = 1.0) -> float:
    """Smallest radius whose tail bound int_R^inf (1+r)|q| is below ``tol``."""
    if q.tail_integral(floor) < tol:
        return floor
    if q.tail_integral(cap) >= tol:
        raise TailTruncationError(f"tail integral at the cap R={cap} is {q.tail_integral(cap):.3e} >= {tol}")
    if q.kind == "custom" and q.tail_bound >= tol:
        raise TailTruncationError("declared tail bound of the custom table exceeds the tail tolerance")
    return float(optimize.brentq(lambda R: q.tail_integral(R) - tol, floor, cap, xtol=1e-10))


# --------------------------------------------------------------------------
# grids


def radial_grid(eps: float, r_max: float, r_min: float = 1e-6, per_decade: int = 40, osc: int = 20) -> np.ndarray:
    """Log-spaced on [r_min, 1] then spacing <= pi/(osc*eps) up to r_max."""
    n_log = max(2, int(math.ceil(per_decade * math.log10(1.0 / r_min))) + 1)
    small = np.logspace(math.log10(r_min), 0.0, n_log)
    if r_max <= 1.0:
        return small[small <= r_max]
    h = min(math.pi / (osc * eps), math.log(10) / per_decade)
    n = int(math.ceil((r_max - 1.0) / h))
    return np.concatenate([small, np.linspace(1.0, r_max, n + 1)[1:]])


@dataclass(frozen=True)
class SolutionGrid:
    """Spinor solution sampled on an increasing radial grid.

    ``values`` has shape (2, N).  ``dense`` (if present) is a callable
    r -> (2, len(r)) interpolant from the integrator used for residual checks.
    """

    radii: np.ndarray
    values: np.ndarray
    kind: str
    lam: float
    diagnostics: dict = field(default_factory=dict)
    dense: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be strictly increasing")

    def spinor(self, i: int) -> coulomb.Spinor:
        return coulomb.Spinor(self.values[0, i], self.values[1, i])

    def residual(self, params: SystemParams, q: PerturbationSpec, sample=None) -> float:
        """Max relative residual of the full system on a 5-point stencil."""
        if self.dense is None:
            raise ValueError("no interpolant attached to this solution")
        r = self.radii[1:-1] if sample is None else np.asarray(sample, dtype=float)
        eps = math.sqrt(abs(self.lam**2 - params.m**2))
        h = 1e-3 * np.minimum(r, 1.0 / max(eps, 1e-3))
        Z = self.dense(r)
        d = (-self.dense(r + 2 * h) + 8 * self.dense(r + h) - 8 * self.dense(r - h) + self.dense(r - 2 * h)) / (12 * h)
        rhs = coulomb.dirac_rhs(params, self.lam, r, Z, q)
        scale = np.abs(Z).max(axis=0) * (1.0 + np.abs(params.k) / r + abs(self.lam) + params.m + abs(params.A) / r)
        return float(np.max(np.linalg.norm(d - rhs, axis=0) / scale))


# --------------------------------------------------------------------------
# series seeds


def frobenius_coefficients(params: SystemParams, lams, q: PerturbationSpec, nterms: int = FROBENIUS_TERMS) -> tuple[float, np.ndarray]:
    """Coefficients z_n (shape (L, nterms, 2)) of F = r^gamma sum z_n r^n.

    ``z_0`` is the leading vector of :meth:`SystemParams.leading_vector`.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    gamma = 0.0 if params.free else params.gamma
    M0 = np.array([[-params.k, params.A], [-params.A, params.k]])
    qc = q.taylor(nterms)
    L = len(lams)
    z = np.zeros((L, nterms, 2))
    z[:, 0, :] = params.leading_vector() if not params.free else np.array([1.0, 0.0])
    for n in range(1, nterms):
        rhs = np.zeros((L, 2))
        # r^1 term: [[0, lam+m], [m-lam, 0]]
        prev = z[:, n - 1, :]
        rhs[:, 0] += (lams + params.m) * prev[:, 1]
        rhs[:, 1] += (params.m - lams) * prev[:, 0]
        # r^{j+1} q_j J terms
        for j in range(0, n):
            if qc[j] == 0.0:
                continue
            zz = z[:, n - 1 - j, :]
            rhs[:, 0] += -qc[j] * zz[:, 1]
            rhs[:, 1] += qc[j] * zz[:, 0]
        Mn = (gamma + n) * np.eye(2) - M0
        z[:, n, :] = np.linalg.solve(Mn, rhs.T).T
    return gamma, z


def frobenius_eval(gamma: float, z: np.ndarray, r) -> np.ndarray:
    """Evaluate the Frobenius series: returns shape (L, 2, len(r))."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    powers = r[None, :] ** np.arange(z.shape[1])[:, None]  # (n, R)
    return np.einsum("lnc,nr->lcr", z, powers) * r[None, None, :] ** gamma


def jost_seed_radius(params: SystemParams, ep: EnergyPoint, tol: float = SERIES_TOL) -> float:
    """Smallest radius (on a coarse scan) where the Coulomb Jost series is accurate to ``tol``."""
    js = coulomb.jost_series(params, ep)
    scale = np.linalg.norm(js.coefficients[0])
    r = np.geomspace(1.0, 1e5, 400)
    err = js.truncation_error(r) / scale
    ok = np.nonzero(err < tol)[0]
    if len(ok) == 0:
        raise TailTruncationError("Jost asymptotic series never reaches the requested accuracy")
    return float(r[ok[0]])


# --------------------------------------------------------------------------
# Runge-Kutta route


def _system_logr(params: SystemParams, lams: np.ndarray, q: PerturbationSpec):
    lp = lams + params.m
    lm = params.m - lams
    k, A = params.k, params.A
    L = len(lams)

    def rhs(s, y):
        r = math.exp(s)
        v = -A / r + float(q(r))
        f, g = y[:L], y[L:]
        df = -k * f + r * (lp - v) * g
        dg = r * (lm + v) * f + k * g
        return np.concatenate([df, dg])

    return rhs


def integrate_regular(params: SystemParams, lams, q: PerturbationSpec, radii, r_frob: float = FROBENIUS_RADIUS):
    """Regular solutions at many energies, shape (L, 2, N).

    Normalised as ``r^gamma [1, b0]`` at the origin.  Radii below ``r_frob``
    use the Frobenius series directly; the rest use DOP853 in ln r.
    Returns ``(values, dense)`` where ``dense(r)`` gives shape (L, 2, len(r)).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    radii = np.asarray(radii, dtype=float)
    gamma, z = frobenius_coefficients(params, lams, q)
    out = np.empty((len(lams), 2, len(radii)), dtype=complex)
    small = radii <= r_frob
    if small.any():
        out[:, :, small] = frobenius_eval(gamma, z, radii[small])
    big = ~small
    y0 = frobenius_eval(gamma, z, [r_frob])[:, :, 0]
    L = len(lams)
    sol = None
    if big.any():
        rhs = _system_logr(params, lams, q)
        sol = integrate.solve_ivp(
            rhs, (math.log(r_frob), math.log(radii[-1])), np.concatenate([y0[:, 0], y0[:, 1]]).astype(complex),
            method="DOP853", dense_output=True, rtol=RK_RTOL, atol=RK_ATOL,
        )
        if not sol.success:
            raise NonConvergenceError(f"ODE integration failed: {sol.message}")
        y = sol.sol(np.log(radii[big]))
        out[:, 0, big] = y[:L]
        out[:, 1, big] = y[L:]

    def dense(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        res = np.empty((L, 2, len(r)), dtype=complex)
        sm = r <= r_frob
        if sm.any():
            res[:, :, sm] = frobenius_eval(gamma, z, r[sm])
        if (~sm).any():
            y = sol.sol(np.log(r[~sm]))
            res[:, 0, ~sm] = y[:L]
            res[:, 1, ~sm] = y[L:]
        return res

    return out, dense


def integrate_jost(params: SystemParams, lams, q: PerturbationSpec, radii, r_seed: float | None = None):
    """Jost solutions at many energies, integrated inward from the asymptotic series.

    Returns ``(values, dense)`` like :func:`integrate_regular`.  Radii beyond
    the seed radius are evaluated from the pure Coulomb Jost series, which is
    exact there up to the perturbation tail.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    radii = np.asarray(radii, dtype=float)
    eps_list = [coulomb.EnergyPoint(l, params.m, params.k, params.A) for l in lams]
    series = [coulomb.jost_series(params, ep) for ep in eps_list]
    if r_seed is None:
        r_tail = select_r_infinity(q)
        r_seed = max([r_tail] + [jost_seed_radius(params, ep) for ep in eps_list])
    L = len(lams)
    y0 = np.array([js(r_seed)[:, 0] for js in series])  # (L, 2)
    rhs = _system_logr(params, lams, q)
    r_lo = min(radii[0], r_seed)
    sol = integrate.solve_ivp(
        rhs, (math.log(r_seed), math.log(r_lo)), np.concatenate([y0[:, 0], y0[:, 1]]).astype(complex),
        method="DOP853", dense_output=True, rtol=RK_RTOL, atol=RK_ATOL,
    )
    if not sol.success:
        raise NonConvergenceError(f"ODE integration failed: {sol.message}")

    def dense(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        res = np.empty((L, 2, len(r)), dtype=complex)
        inner = r <= r_seed
        if inner.any():
            y = sol.sol(np.log(r[inner]))
            res[:, 0, inner] = y[:L]
            res[:, 1, inner] = y[L:]
        if (~inner).any():
            for i, js in enumerate(series):
                res[i, :, ~inner] = js(r[~inner]).T
        return res

    return dense(radii), dense, r_seed


# --------------------------------------------------------------------------
# Picard route


def reference_fundamental(params: SystemParams, ep: EnergyPoint, radii) -> tuple[np.ndarray, complex]:
    """Pure Coulomb fundamental matrices D(r) (shape (N, 2, 2)) and det D.

    For A != 0 the closed-form columns [F0, G0] are used.  For A = 0 the
    closed forms degenerate, so the regular solution and the Jost solution of
    the unperturbed system, both integrated numerically, serve as columns;
    the kernel D(r) D(t)^{-1} does not depend on that choice.
    """
    radii = np.asarray(radii, dtype=float)
    if params.A != 0:
        D = np.array([coulomb.fundamental_matrix(params, ep, r).entries for r in radii])
        Md = coulomb.wronskian_constant(params, ep)
        return D, Md
    zero = PerturbationSpec.zero()
    F, _ = integrate_regular(params, [ep.lam], zero, radii)
    Phi, _, _ = integrate_jost(params, [ep.lam], zero, radii)
    D = np.stack([F[0].T, Phi[0].T], axis=2)  # (N, 2, 2)
    dets = D[:, 0, 0] * D[:, 1, 1] - D[:, 0, 1] * D[:, 1, 0]
    return D, complex(np.median(dets.real) + 1j * np.median(dets.imag))


def _adjugate(D):
    adj = np.empty_like(D)
    adj[:, 0, 0] = D[:, 1, 1]
    adj[:, 1, 1] = D[:, 0, 0]
    adj[:, 0, 1] = -D[:, 0, 1]
    adj[:, 1, 0] = -D[:, 1, 0]
    return adj


def _cumulative(radii, integrand, from_right: bool):
    """Cumulative integral of a complex (N, 2) integrand on a non-uniform grid.

    Per-interval integrals of the cubic spline are summed from the anchored
    end, so no large antiderivative values are ever subtracted.
    """
    h = np.diff(radii)
    powers = np.stack([h**4 / 4, h**3 / 3, h**2 / 2, h])  # matches PPoly coefficient order
    out = np.zeros_like(integrand)
    for c in range(integrand.shape[1]):
        pieces = np.sum(CubicSpline(radii, integrand[:, c]).c * powers, axis=0)
        if from_right:
            out[:-1, c] = np.cumsum(pieces[::-1])[::-1]
        else:
            out[1:, c] = np.cumsum(pieces)
    return out


def _picard(Z0, D, Md, qv, radii, from_right, head=None):
    adj = _adjugate(D) / Md
    Z = Z0.copy()
    trace = []
    prev_inc = None
    for it in range(1, PICARD_MAX_ITER + 1):
        qZ = (qv[:, None] * np.einsum("ij,nj->ni", J, Z))
        integrand = np.einsum("nij,nj->ni", adj, qZ)
        cum = _cumulative(radii, integrand, from_right)
        if head is not None and not from_right:
            cum = cum + head * integrand[:1]  # int_0^{r_min} ~ r_min * integrand(r_min)
        corr = np.einsum("nij,nj->ni", D, cum)
        Z_new = Z0 - corr if from_right else Z0 + corr
        scale = np.max(np.abs(Z_new))
        inc = float(np.max(np.abs(Z_new - Z)) / scale)
        trace.append(inc)
        Z = Z_new
        if inc < PICARD_TOL:
            break
        if prev_inc is not None and it > 8 and inc > prev_inc:
            raise NonConvergenceError("Picard iteration is not contracting", trace)
        prev_inc = inc
    else:
        raise NonConvergenceError(f"Picard iteration did not converge in {PICARD_MAX_ITER} iterations", trace)
    return Z, trace


def picard_regular(params: SystemParams, ep: EnergyPoint, q: PerturbationSpec, radii) -> tuple[np.ndarray, list[float]]:
    """Regular solution from the from-zero integral equation; shape (2, N)."""
    radii = np.asarray(radii, dtype=float)
    D, Md = reference_fundamental(params, ep, radii)
    F0 = D[:, :, 0]
    Z, trace = _picard(F0, D, Md, q(radii), radii, from_right=False, head=radii[0])
    return Z.T, trace


def picard_jost(params: SystemParams, ep: EnergyPoint, q: PerturbationSpec, radii) -> tuple[np.ndarray, list[float]]:
    """Jost solution from the from-infinity integral equation; shape (2, N).

    The integral is truncated at ``radii[-1]`` (choose it >= R_inf).
    """
    radii = np.asarray(radii, dtype=float)
    D, Md = reference_fundamental(params, ep, radii)
    if params.A != 0:
        scale = coulomb.irregular_to_jost_scale(params, ep)
        Phi0 = D[:, :, 1] * scale
    else:
        Phi0 = D[:, :, 1]
    Z, trace = _picard(Phi0, D, Md, q(radii), radii, from_right=True)
    return Z.T, trace


def contraction_ratios(trace: list[float]) -> np.ndarray:
    t = np.asarray(trace)
    return t[1:] / t[:-1]


# --------------------------------------------------------------------------
# public solvers


def default_grid(params: SystemParams, ep: EnergyPoint, q: PerturbationSpec) -> np.ndarray:
    r_inf = select_r_infinity(q)
    return radial_grid(ep.eps, max(r_inf, 10.0), per_decade=60, osc=40)


def solve_regular(params: SystemParams, ep: EnergyPoint, q: PerturbationSpec, grid=None, cross_check: bool = True) -> SolutionGrid:
    """Regular solution F ~ r^gamma [1, b0] of the perturbed system.

    Values come from Picard iteration on the from-zero integral equation;
    with ``cross_check`` an independent DOP853 integration must agree to
    1e-6 relative or :class:`NonConvergenceError` is raised.
    """
    radii = default_grid(params, ep, q) if grid is None else np.asarray(grid, dtype=float)
    rk, dense = integrate_regular(params, [ep.lam], q, radii)
    rk = rk[0]
    diag = {"method": "picard"}
    if q.is_zero and params.A != 0:
        vals = np.array([coulomb.regular_solution(params, ep, r).as_array() for r in radii]).T
        diag["method"] = "closed-form"
    elif params.free and q.is_zero:
        vals = rk
        diag["method"] = "rk"
    else:
        vals, trace = picard_regular(params, ep, q, radii)
        diag["picard_trace"] = trace
    if cross_check:
        err = float(np.max(np.abs(vals - rk) / np.maximum(np.abs(rk).max(axis=0), 1e-300)))
        diag["rk_agreement"] = err
        if err > CROSS_CHECK_TOL:
            raise NonConvergenceError(f"integral-equation and ODE solutions disagree ({err:.2e})", diag.get("picard_trace"))
    return SolutionGrid(radii, vals, "regular", ep.lam, diag, lambda r: dense(r)[0])


def solve_jost(params: SystemParams, ep: EnergyPoint, q: PerturbationSpec, grid=None, cross_check: bool = True) -> SolutionGrid:
    """Jost solution Phi ~ e^{-i eps r} r^{-i phi} [sqrt(m+lam), -sqrt(m-lam)].

    The from-infinity integral equation is truncated at R_inf (tail bound
    1e-10); grid points beyond R_inf use the pure Coulomb Jost series.
    """
    r_inf = select_r_infinity(q)
    radii = default_grid(params, ep, q) if grid is None else np.asarray(grid, dtype=float)
    if radii[-1] > R_CAP:
        raise TailTruncationError("grid extends past the admissible cap")
    rk, dense, r_seed = integrate_jost(params, [ep.lam], q, radii)
    rk = rk[0]
    diag = {"method": "picard", "r_inf": r_inf, "r_seed": r_seed}
    if q.is_zero:
        vals = rk
        diag["method"] = "rk"
    else:
        inner = radii <= r_inf
        pic_radii = np.concatenate([radii[inner], [r_inf]]) if radii[inner][-1] < r_inf else radii[inner]
        pv, trace = picard_jost(params, ep, q, pic_radii)
        vals = rk.copy()
        vals[:, inner] = pv[:, : inner.sum()]
        diag["picard_trace"] = trace
    if cross_check:
        err = float(np.max(np.abs(vals - rk) / np.maximum(np.abs(rk).max(axis=0), 1e-300)))
        diag["rk_agreement"] = err
        if err > CROSS_CHECK_TOL:
            raise NonConvergenceError(f"integral-equation and ODE solutions disagree ({err:.2e})", diag.get("picard_trace"))
    return SolutionGrid(radii, vals, "jost", ep.lam, diag, lambda r: dense(r)[0])


def jost_compensated(params: SystemParams, ep: EnergyPoint, r, values) -> np.ndarray:
    """e^{i eps r} r^{i phi} Phi(r) / v0 - 1 per component (shape (2, N))."""
    r = np.asarray(r, dtype=float)
    v0 = np.array([ep.sqrt_m_plus_lambda, -ep.sqrt_m_minus_lambda])
    comp = np.exp(1j * ep.eps * r + 1j * ep.phi * np.log(r)) * values
    return comp / v0[:, None] - 1.0


@dataclass(frozen=True)
class JostAsymptoticsReport:
    M_phi: complex
    M_psi: complex
    window: tuple[float, float]
    remainder_integral: float
    remainder_tail: float
    boundary_error: float
    boundary_radius: float


def verify_jost_asymptotics(sol: SolutionGrid, params: SystemParams, ep: EnergyPoint, window=None, q: PerturbationSpec | None = None) -> JostAsymptoticsReport:
    """Fit ``Phi = e^{-i eps r} r^{-i phi} v0 (1 + M/r + m(r))`` on a large-r window.

    Reports the fitted M for each component, the integral of the remainder
    |m| over the window, and the boundary error at R_inf / 2.
    """
    if sol.dense is None:
        raise FitError("solution has no interpolant")
    r_inf = sol.diagnostics.get("r_inf", select_r_infinity(q) if q is not None else 10.0)
    lo, hi = window if window is not None else (50.0, max(4 * 50.0, 2 * r_inf))
    r = np.linspace(lo, hi, 400)
    w = jost_compensated(params, ep, r, sol.dense(r))
    # least squares in (1/r, 1/r^2)
    X = np.stack([1 / r, 1 / r**2], axis=1)
    M = []
    rem = []
    for c in range(2):
        coef, *_ = np.linalg.lstsq(X, w[c], rcond=None)
        M.append(coef[0])
        rem.append(np.abs(w[c] - coef[0] / r))
    rem = np.max(rem, axis=0)
    half = len(r) // 2
    if not np.max(rem[half:]) < np.max(rem[:half]) or not np.max(rem[:half]) > 0:
        if np.max(rem) > 1e-12:
            raise FitError("remainder after the 1/r correction is not decreasing")
    rb = r_inf / 2
    wb = jost_compensated(params, ep, [rb], sol.dense([rb]))
    v0 = np.array([ep.sqrt_m_plus_lambda, -ep.sqrt_m_minus_lambda])
    boundary = float(np.linalg.norm(wb[:, 0] * v0) / np.linalg.norm(v0))
    return JostAsymptoticsReport(
        M_phi=complex(M[0]), M_psi=complex(M[1]), window=(lo, hi),
        remainder_integral=float(integrate.trapezoid(rem, r)),
        remainder_tail=float(integrate.trapezoid(rem[half:], r[half:])),
        boundary_error=boundary, boundary_radius=rb,
    )


def kernel_bound_small(params: SystemParams, ep: EnergyPoint, radii) -> float:
    """max ||r^-gamma D(r) D(t)^{-1} t^gamma|| over sampled t <= r <= 1."""
    radii = np.asarray([r for r in radii if r <= 1.0])
    D, Md = reference_fundamental(params, ep, radii)
    adj = _adjugate(D) / Md
    g = 0.0 if params.free else params.gamma
    best = 0.0
    for i in range(len(radii)):
        for j in range(i + 1):
            K = D[i] @ adj[j] * (radii[j] / radii[i]) ** g
            best = max(best, float(np.linalg.norm(K, 2)))
    return best


def kernel_bound_large(params: SystemParams, ep: EnergyPoint, radii) -> float:
    """max ||D(r) D(t)^{-1}|| over sampled r <= t."""
    radii = np.asarray(radii)
    D, Md = reference_fundamental(params, ep, radii)
    adj = _adjugate(D) / Md
    best = 0.0
    for i in range(len(radii)):
        for j in range(i, len(radii)):
            best = max(best, float(np.linalg.norm(D[i] @ adj[j], 2)))
    return best


def realness_defect(values: np.ndarray) -> float:
    """Imaginary part left after the best unimodular rescale of a solution."""
    v = values.ravel()
    i = np.argmax(np.abs(v))
    phase = v[i] / abs(v[i])
    w = v / phase
    return float(np.max(np.abs(w.imag)) / np.max(np.abs(w)))
