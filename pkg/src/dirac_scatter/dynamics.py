"""Time-dependent side: the operator T = U0^{-1} U, compensated packet
asymptotics, the dynamical deviation factor, the dynamical scattering
operator and the comparison with the stationary scattering matrix.

For a packet g the compensated quantity is

    Q(lam, t) = |t|^{i sgn(t) phi(lam)} e^{-i t eps} T(e^{i t eps(u)} g)(lam),

whose limits are L+ = i (rho/rho1) c11 g and L- = -i (rho/rho1) conj(c11) g.
The dynamical scattering entry is read off from the two limits alone,
S_dyn = -sigma L+ / L-, with sigma = +1 on lam > m and -1 on lam < -m.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import coulomb, scatter, spectral
from .coulomb import Case, SystemParams
from .errors import OscillationResolutionError, PoleError, QuadratureError, ZeroCoefficientError
from .perturb import PerturbationSpec
from .scatter import ScatteringData
from .specfun import POLE_TOL, gamma_complex
from .spectral import EnergyQuadrature, FreeBasis, Packet, PerturbedBasis, RadialQuadrature

# geometric in sqrt(2) from 25 to 400 (contains 25, 50, 100, 200, 400); the
# limit fit uses |t| >= FIT_FROM_FACTOR / eps_min, earlier times are reported only
DEFAULT_TIME_FACTORS = tuple(25.0 * 2.0 ** (k / 2) for k in range(9))
FIT_FROM_FACTOR = 50.0
PACKET_EXTENT = 300.0
ALIAS_MARGIN = 1.2
COST_BUDGET = 4.0e7  # radial nodes x energy nodes


# --------------------------------------------------------------------------
# deviation factor


@dataclass(frozen=True)
class DeviationFactorDynamical:
    """W0(t) = |t lam / eps|^{i sgn(t) phi(lam)}, defined for |t| > R."""

    lam: float
    m: float
    A: float
    R: float = 0.0

    @property
    def eps(self) -> float:
        return math.sqrt(self.lam**2 - self.m**2)

    @property
    def phi(self) -> float:
        return self.A * self.lam / self.eps

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(np.abs(t) <= self.R):
            raise ValueError(f"W0 is defined only for |t| > {self.R}")
        val = np.exp(1j * np.sign(t) * self.phi * np.log(np.abs(t * self.lam / self.eps)))
        return val if val.ndim else complex(val)


def sluggishness(W: DeviationFactorDynamical, t: float, tau: float) -> float:
    """|W0(t + tau) / W0(t) - 1|."""
    return abs(W(t + tau) / W(t) - 1.0)


# --------------------------------------------------------------------------
# limit traces


@dataclass(frozen=True)
class LimitTrace:
    """Finite-t values of a quantity whose |t| -> inf limit is sought.

    ``values`` has shape (T, P) (P probe energies).  The limit is the
    constant term of a least-squares fit over the samples with
    |t| >= ``fit_from``.  With a Coulomb tail the phase |t|^{i phi(u)} turns
    the large-t expansion into sum_n t^{-n} P_n(log|t|) with deg P_n <= n;
    through the available order the basis is
    {1, 1/t, log|t|/t, 1/t^2, log|t|/t^2}.  Without it (``log_terms=False``)
    the basis is {1, 1/t, 1/t^2, 1/t^3}.
    """

    times: np.ndarray
    values: np.ndarray
    extrapolated: np.ndarray
    convergence_rate: np.ndarray
    increments: np.ndarray

    @classmethod
    def from_values(cls, times, values, log_terms: bool = True, fit_from: float = 0.0) -> "LimitTrace":
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None]
        if np.any(np.diff(np.abs(times)) <= 0):
            raise ValueError("times must be strictly increasing in |t|")
        sel = np.abs(times) >= fit_from
        if not np.any(sel):
            raise ValueError("no samples beyond fit_from")
        at = np.abs(times[sel])
        lt = np.log(at)
        if log_terms:
            cols = [np.ones_like(at), 1 / at, lt / at, at**-2.0, lt / at**2]
        else:
            cols = [np.ones_like(at), 1 / at, at**-2.0, at**-3.0]
        basis = np.stack(cols[: len(at)], axis=1)
        extrap = np.linalg.lstsq(basis, values[sel], rcond=None)[0][0]
        inc = np.abs(np.diff(values, axis=0))
        with np.errstate(divide="ignore", invalid="ignore"):
            rate = inc[-1] / inc[-2] if len(inc) >= 2 else np.full(values.shape[1], np.nan)
        return cls(times, values, extrap, rate, inc)

    @property
    def monotone(self) -> np.ndarray:
        return np.all(np.diff(self.increments, axis=0) < 0, axis=0)


# --------------------------------------------------------------------------
# time evolution through the transforms


class PacketEvolution:
    """Evaluates T(e^{i t eps(u)} g) at probe energies for a range of times.

    The perturbed eigenfunctions are prepared once on energy nodes fine
    enough to keep the trapezoid aliasing period 2 pi / d_eps beyond
    ``r_cut + t_max``; the radial range covers the packet out to
    ``t_max + extent``.
    """

    def __init__(self, params: SystemParams, q: PerturbationSpec, packet: Packet, t_max: float,
                 extent: float = PACKET_EXTENT, basis=None, piece: str = "full"):
        self.params = params
        self.q = q
        self.packet = packet
        self.t_max = float(t_max)
        self.r_cut = math.ceil(self.t_max + extent)
        self.equad = EnergyQuadrature.for_packets([packet], params.m, self.r_cut + self.t_max, ALIAS_MARGIN)
        self.rquad = RadialQuadrature.panels(self.r_cut)
        cost = len(self.equad.lam) * len(self.rquad.r)
        if cost > COST_BUDGET:
            raise OscillationResolutionError(f"t_max={t_max:.0f} needs {cost:.2e} basis samples (budget {COST_BUDGET:.1e})")
        self.basis = basis if basis is not None else PerturbedBasis(params, q)
        self.piece = piece
        if piece == "full":
            pb = self.basis.prepare(self.equad.lam, self.rquad.r)
            self.f, self.g = pb.f, pb.g
        elif piece == "incoming":
            self.f, self.g = _incoming_piece(params, q, self.equad.lam, self.rquad.r)
        else:
            raise ValueError(piece)
        self.rho = self.basis.density(self.equad.lam)
        self.eps_nodes = np.sqrt(self.equad.lam**2 - params.m**2)
        self.gvals = packet(self.equad.lam)

    def radial(self, t: float) -> np.ndarray:
        """U(e^{i t eps} g) on the radial nodes, shape (2, R)."""
        if abs(t) > self.t_max * (1 + 1e-12):
            raise OscillationResolutionError(f"|t|={abs(t)} exceeds the prepared t_max={self.t_max}")
        c = self.gvals * self.rho * self.equad.w * np.exp(1j * t * self.eps_nodes)
        return np.array([self.f @ c, self.g @ c])

    def free_inverse(self, h: np.ndarray, lams) -> np.ndarray:
        pb = FreeBasis(self.params.m).prepare(np.atleast_1d(lams), self.rquad.r)
        hw = h * self.rquad.w[None, :]
        return hw[0] @ pb.f + hw[1] @ pb.g

    def T(self, t: float, lams) -> np.ndarray:
        return self.free_inverse(self.radial(t), lams)

    def compensated(self, t: float, lams) -> np.ndarray:
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        eps = np.sqrt(lams**2 - self.params.m**2)
        phi = self.params.A * lams / eps
        return np.abs(t) ** (1j * np.sign(t) * phi) * np.exp(-1j * t * eps) * self.T(t, lams)


def _incoming_piece(params, q, lam, r):
    """alpha Phi0 / amplitude beyond the matching radius, zero inside."""
    eps_min = float(np.sqrt(lam**2 - params.m**2).min())
    r_match = scatter.match_radius(params, q, eps_min)
    alphas, _ = scatter.regular_alpha(params, q, lam, r_match)
    sp = np.where(lam > -params.m, np.sqrt(np.abs(params.m + lam)) + 0j, 1j * np.sqrt(np.abs(params.m + lam)))
    amp = np.abs(2 * alphas * sp)
    f = np.zeros((len(r), len(lam)), dtype=complex)
    g = np.zeros((len(r), len(lam)), dtype=complex)
    outer = r > r_match
    for j, l in enumerate(lam):
        ep = coulomb.EnergyPoint(l, params.m, params.k, params.A)
        Z = alphas[j] * coulomb.jost_series(params, ep, order=40)(r[outer]) / amp[j]
        f[outer, j] = Z[0]
        g[outer, j] = Z[1]
    return f, g


def t_operator(params: SystemParams, q: PerturbationSpec, packet: Packet, lams, r_cut: float = spectral.R_CUT) -> np.ndarray:
    """(T g)(lam) = U0^{-1}(U g)(lam) at the requested energies."""
    ev = PacketEvolution(params, q, packet, t_max=0.0, extent=r_cut)
    return ev.T(0.0, lams)


def t_operator_kernel(params: SystemParams, q: PerturbationSpec, packet: Packet, lams, r_cut: float = spectral.R_CUT) -> np.ndarray:
    """Same as :func:`t_operator` through the explicit double integral:
    first the kernel K(lam, u) = int [f1 g1](r, lam) [f g](r, u) dr, then
    int K(lam, u) g(u) rho(u) du."""
    ev = PacketEvolution(params, q, packet, t_max=0.0, extent=r_cut)
    pb = FreeBasis(params.m).prepare(np.atleast_1d(lams), ev.rquad.r)
    w = ev.rquad.w[:, None]
    K = (pb.f * w).T @ ev.f + (pb.g * w).T @ ev.g
    return K @ (ev.gvals * ev.rho * ev.equad.w)


def time_grid(eps_min: float, factors=DEFAULT_TIME_FACTORS) -> np.ndarray:
    return np.asarray(factors, dtype=float) / eps_min


def packet_time_asymptotics(params: SystemParams, q: PerturbationSpec, packet: Packet, t: float, lams, evolution: PacketEvolution | None = None) -> np.ndarray:
    """Compensated quantity Q(lam, t) at the probe energies."""
    ev = evolution if evolution is not None else PacketEvolution(params, q, packet, abs(t))
    return ev.compensated(t, lams)


# --------------------------------------------------------------------------
# scattering operators


def s_dyn(sd: ScatteringData, case: Case) -> np.ndarray:
    """Dynamical scattering operator in the momentum representation.

    Diagonal, with entry c11/conj(c11) on the component living on lam > m
    and -c11/conj(c11) on the component living on lam < -m.
    """
    c = sd.c1[0]
    if abs(c) < scatter.ZERO_COEFF_TOL:
        raise ZeroCoefficientError("c_{1,1} vanishes")
    s = c / np.conj(c)
    return np.diag([s, -s])


def s_dyn_entry(sd: ScatteringData, case: Case) -> complex:
    """The entry of S_dyn acting on the L-component at this energy."""
    S = s_dyn(sd, case)
    return complex(S[0, 0] if case is Case.POSITIVE else S[1, 1])


def s_st_entry(sd: ScatteringData, case: Case) -> complex:
    return sd.s11 if case is Case.POSITIVE else sd.s21


@dataclass
class ProbeResult:
    lam: float
    case: Case
    g: complex
    plus: LimitTrace
    minus: LimitTrace
    scattering: ScatteringData
    s_dyn_measured: complex
    s_dyn_chain: complex
    s_st: complex
    limit_error_plus: float
    limit_error_minus: float

    @property
    def residual(self) -> float:
        return abs(self.s_dyn_measured - self.s_st)


@dataclass
class ErgodicReport:
    probes: list[ProbeResult]
    times: np.ndarray
    wrong_direction: dict = field(default_factory=dict)
    deviation_identity: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(p.residual for p in self.probes)

    @property
    def max_limit_error(self) -> float:
        return max(max(p.limit_error_plus, p.limit_error_minus) for p in self.probes)


def default_packets(m: float, lams) -> list[Packet]:
    """One wide bump per branch that contains the requested probe energies."""
    lams = np.asarray(lams, dtype=float)
    out = []
    for sign in (+1, -1):
        sel = np.abs(lams[np.sign(lams) == sign])
        if len(sel) == 0:
            continue
        lo = m + 0.35 * (sel.min() - m)
        hi = sel.max() + 0.5 * (sel.max() - m) / 2 + 0.1
        a, b = (lo, hi) if sign > 0 else (-hi, -lo)
        out.append(Packet(a, b, m))
    return out


def deviation_identity(params: SystemParams, lam: float, times) -> float:
    """max |V0(|t lam/eps|) - W0(t)| over t > 0 for the Coulomb deviation factors."""
    V0 = scatter.DeviationFactorStationary(lam, params.m, params.A)
    W0 = DeviationFactorDynamical(lam, params.m, params.A)
    t = np.asarray([x for x in times if x > 0], dtype=float)
    eps = math.sqrt(lam**2 - params.m**2)
    return float(np.max(np.abs(V0(np.abs(t * lam / eps)) - W0(t))))


def ergodic_check(params: SystemParams, q: PerturbationSpec, lambda_grid, packet_suite=None, time_factors=DEFAULT_TIME_FACTORS,
                  wrong_direction: bool = True) -> ErgodicReport:
    """Compare S_dyn measured from the time limits with S_st on a grid of energies."""
    lams = np.asarray(lambda_grid, dtype=float)
    eps_min = float(np.sqrt(lams**2 - params.m**2).min())
    times = time_grid(eps_min, time_factors)
    packets = list(packet_suite) if packet_suite else default_packets(params.m, lams)
    probes: list[ProbeResult] = []
    wrong = {}
    for packet in packets:
        inside = lams[(lams > packet.a) & (lams < packet.b)]
        if len(inside) == 0:
            continue
        ev = PacketEvolution(params, q, packet, times[-1])
        log_terms = params.A != 0
        fit_from = min(FIT_FROM_FACTOR, sorted(time_factors)[len(time_factors) // 2]) / eps_min
        plus = LimitTrace.from_values(times, [ev.compensated(t, inside) for t in times], log_terms, fit_from)
        minus = LimitTrace.from_values(-times, [ev.compensated(-t, inside) for t in times], log_terms, fit_from)
        del ev
        gv = packet(inside)
        for j, lam in enumerate(inside):
            sd = scatter.scattering_data(params, q, float(lam))
            case = Case.POSITIVE if lam > 0 else Case.NEGATIVE
            sigma = 1.0 if case is Case.POSITIVE else -1.0
            Lp, Lm = plus.extrapolated[j], minus.extrapolated[j]
            kappa = sd.rho / scatter.rho1(lam, params.m)
            expected_p = 1j * kappa * sd.c1[0] * gv[j]
            expected_m = -1j * kappa * np.conj(sd.c1[0]) * gv[j]
            z = Lp / (1j * gv[j])
            probes.append(ProbeResult(
                lam=float(lam), case=case, g=complex(gv[j]), plus=_column(plus, j), minus=_column(minus, j), scattering=sd,
                s_dyn_measured=complex(-sigma * Lp / Lm),
                s_dyn_chain=complex(sigma * z**2 / abs(z) ** 2),
                s_st=s_st_entry(sd, case),
                limit_error_plus=float(abs(Lp - expected_p) / abs(gv[j])),
                limit_error_minus=float(abs(Lm - expected_m) / abs(gv[j])),
            ))
        if wrong_direction:
            evi = PacketEvolution(params, q, packet, times[-1], piece="incoming")
            t_small, t_big = -50.0 / eps_min, -400.0 / eps_min
            q_small = np.abs(evi.compensated(t_small, inside))
            q_big = np.abs(evi.compensated(t_big, inside))
            wrong[packet.center] = {"lams": inside, "small_t": q_small, "large_t": q_big,
                                    "ratio": q_big / q_small}
            del evi
    probes.sort(key=lambda p: p.lam)
    ident = max(deviation_identity(params, p.lam, times) for p in probes) if probes else 0.0
    return ErgodicReport(probes, times, wrong, ident)


def _column(trace: LimitTrace, j: int) -> LimitTrace:
    return LimitTrace(trace.times, trace.values[:, j:j + 1], trace.extrapolated[j:j + 1],
                      np.atleast_1d(trace.convergence_rate)[j:j + 1], trace.increments[:, j:j + 1])


# --------------------------------------------------------------------------
# distributional Fourier integral


def distributional_fourier_closed(mu: complex, x: float) -> complex:
    """i Gamma(mu+1) (e^{i mu pi/2} x_+^{-mu-1} - e^{-i mu pi/2} x_-^{-mu-1})."""
    _check_mu(mu)
    if x == 0:
        raise ValueError("x must be non-zero")
    g = gamma_complex(mu + 1)
    if x > 0:
        return 1j * g * cmath.exp(1j * mu * math.pi / 2) * x ** (-mu - 1)
    return -1j * g * cmath.exp(-1j * mu * math.pi / 2) * abs(x) ** (-mu - 1)


def _check_mu(mu: complex):
    if abs(mu.imag) < POLE_TOL and mu.real <= -1 + POLE_TOL and abs(mu.real - round(mu.real)) < POLE_TOL:
        raise PoleError(f"mu = {mu} is a negative integer")


def damped_fourier_quadrature(mu: complex, x: float, delta: float, panel: float | None = None) -> complex:
    """int_0^inf r^mu e^{(i x - delta) r} dr by quadrature.

    [0, 1]: termwise-integrated power series; [1, R]: Gauss-Legendre panels
    resolving the oscillation; beyond R = 40/delta the integrand is below
    e^{-40}.
    """
    z = 1j * x - delta
    head = 0j
    term = 1.0 + 0j
    for n in range(400):
        add = term / (mu + n + 1)
        head += add
        if n > 5 and abs(add) < 1e-17 * abs(head):
            break
        term *= z / (n + 1)
    R = 40.0 / delta
    h = panel if panel is not None else min(1.0, math.pi / (4 * max(abs(x), 1e-3)))
    edges = np.arange(1.0, R + h, h)
    xg, wg = np.polynomial.legendre.leggauss(12)
    lo, hi = edges[:-1], edges[1:]
    r = (0.5 * (hi - lo)[:, None] * (xg[None, :] + 1) + lo[:, None]).ravel()
    w = (0.5 * (hi - lo)[:, None] * wg[None, :]).ravel()
    body = np.sum(w * np.exp(mu * np.log(r) + z * r))
    return complex(head + body)


@dataclass(frozen=True)
class FourierOracleResult:
    mu: complex
    x: float
    closed_form: complex
    extrapolated: complex
    samples: tuple
    deltas: tuple

    @property
    def discrepancy(self) -> float:
        return abs(self.closed_form - self.extrapolated) / abs(self.closed_form)

    @property
    def error_estimate(self) -> float:
        """Leading relative error of the quadratic delta -> 0 extrapolation,
        prod(delta) |G3(0)/G(0)| / 6 with G3 the third delta-derivative of
        G(delta) = Gamma(mu+1) (delta - i x)^{-mu-1}."""
        mu = complex(self.mu)
        return float(np.prod(self.deltas) * abs((mu + 1) * (mu + 2) * (mu + 3)) / (6 * abs(self.x) ** 3))


def distributional_fourier_oracle(mu: complex, x: float, deltas=(0.1, 0.05, 0.025)) -> FourierOracleResult:
    """Closed form versus delta -> 0 extrapolation of the damped quadrature."""
    mu = complex(mu)
    _check_mu(mu)
    closed = distributional_fourier_closed(mu, x)
    vals = np.array([damped_fourier_quadrature(mu, x, d) for d in deltas])
    d = np.asarray(deltas, dtype=float)
    coef = np.linalg.solve(np.vander(d, len(d)), vals)
    return FourierOracleResult(mu, float(x), closed, complex(coef[-1]), tuple(vals), tuple(deltas))


# --------------------------------------------------------------------------
# classical case A = 0


def fourier_identity_closed(m: float, lam: float, u: float) -> complex:
    """(1/4) ln|(u^2 - lam^2)/(u^2 - m^2)| - (i pi / 4) [m < u < lam]."""
    val = 0.25 * math.log(abs((u * u - lam * lam) / (u * u - m * m)))
    return complex(val, -math.pi / 4 if m < u < lam else 0.0)


def fourier_identity_quadrature(m: float, lam: float, u: float, R: float = 200.0) -> complex:
    """int_0^inf e^{-i r mu} sin^2(eps r / 2) / r dr with mu = sqrt(u^2 - m^2).

    Adaptive quadrature on [0, R]; the tail uses
    int_R^inf e^{-i a r}/r dr = E1(i a R) for each exponential.
    """
    if abs(u - lam) < 0.02:
        raise QuadratureError("u too close to lambda (logarithmic singularity)")
    mu = math.sqrt(u * u - m * m)
    eps = math.sqrt(lam * lam - m * m)

    def part(fun):
        return integrate.quad(fun, 0.0, R, limit=4000, epsabs=1e-13, epsrel=1e-12)[0]

    re = part(lambda r: math.cos(mu * r) * math.sin(eps * r / 2) ** 2 / r if r > 0 else 0.0)
    im = part(lambda r: -math.sin(mu * r) * math.sin(eps * r / 2) ** 2 / r if r > 0 else 0.0)

    def tail(a):
        if a == 0:
            raise QuadratureError("zero frequency in the tail")
        e = special.exp1(1j * abs(a) * R)
        return e if a > 0 else np.conj(e)

    t = 0.5 * tail(mu) - 0.25 * (tail(mu - eps) + tail(mu + eps))
    return complex(re + t.real, im + t.imag)


def principal_value_limit(f, lam: float, t: float, support: tuple[float, float]) -> complex:
    """(i/pi) PV int f(u) e^{i (lam - u) t} / (lam - u) du over the support of f."""
    a, b = support

    def g(u, part):
        v = f(u) * np.exp(1j * (lam - u) * t)
        return v.real if part == 0 else v.imag

    # PV int h(u)/(lam - u) = -PV int h(u)/(u - lam); QUADPACK 'cauchy' weight is 1/(u - wvar)
    re = integrate.quad(lambda u: g(u, 0), a, b, weight="cauchy", wvar=lam, limit=2000)[0]
    im = integrate.quad(lambda u: g(u, 1), a, b, weight="cauchy", wvar=lam, limit=2000)[0]
    return 1j / math.pi * (-(re + 1j * im))


@dataclass(frozen=True)
class FreeCaseReport:
    lam: float
    m: float
    identity_rows: tuple  # (u, closed, quadrature, abs error)
    pv_rows: tuple  # (t, value, expected, abs error)

    @property
    def max_identity_error(self) -> float:
        return max(r[3] for r in self.identity_rows)

    @property
    def max_pv_error(self) -> float:
        return max(r[3] for r in self.pv_rows)


def free_case_identities(m: float, lam: float, u_grid, pv_times=(200.0, -200.0), bump: Packet | None = None) -> FreeCaseReport:
    rows = []
    for u in u_grid:
        if abs(u - lam) < 0.02:
            continue
        c = fourier_identity_closed(m, lam, u)
        qv = fourier_identity_quadrature(m, lam, u)
        rows.append((float(u), c, qv, abs(c - qv)))
    if bump is None:
        bump = Packet(lam - 0.6, lam + 0.7, m) if lam > m + 0.6 else Packet(m + 0.05, lam + 0.7, m)
    f = lambda u: complex(bump(np.array([u]))[0])
    pv = []
    for t in pv_times:
        val = principal_value_limit(f, lam, t, (bump.a, bump.b))
        expected = -math.copysign(1.0, t) * f(lam)
        pv.append((float(t), val, expected, abs(val - expected)))
    return FreeCaseReport(lam, m, tuple(rows), tuple(pv))
