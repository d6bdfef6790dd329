"""Eigenfunction transforms of the free and perturbed radial Dirac operators.

Momentum-space functions are scalar functions F(lam) on
E = (-inf, -m] U [m, inf); the transforms are

    (U F)(r)      = int_E [f; g](r, lam) F(lam) rho(lam) dlam
    (U^{-1} h)(l) = int_0^inf [f g](r, l) h(r) dr,

with [f1, g1] = [cos eps r, beta sin eps r] and rho1 for the free operator,
and the unit-amplitude regular solution with rho = rho1 for the perturbed one.

Energy integrals use the trapezoid rule in eps on the (compact) packet
support, which is spectrally accurate for smooth bumps as long as the
aliasing period 2 pi / d_eps exceeds the radial extent.  Radial integrals
use 16-point Gauss-Legendre panels of unit width, geometrically refined
towards the origin.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import coulomb, perturb
from .coulomb import EnergyPoint, Spinor, SystemParams
from .errors import QuadratureError, SpectralGapError, TruncationError
from .perturb import PerturbationSpec
from .scatter import regular_alpha, rho1

__all__ = [
    "rho1", "free_eigenfunction", "Component", "Packet", "EnergyQuadrature", "RadialQuadrature",
    "RadialFunction", "FreeBasis", "PerturbedBasis", "SpectralTransform", "u0_forward", "u0_inverse",
    "u_forward", "u_inverse", "apply_operator", "truncation_estimate",
]

GL_NODES = 16
R_CUT = 400.0
MIN_PACKET_WIDTH = 0.2


def free_eigenfunction(ep: EnergyPoint, r) -> Spinor:
    """[cos eps r, beta sin eps r] with f(0) = 1, g(0) = 0."""
    return Spinor(np.cos(ep.eps * np.asarray(r)), ep.beta * np.sin(ep.eps * np.asarray(r)))


class Component(enum.Enum):
    UPPER_ON_POSITIVE = "upper"
    LOWER_ON_NEGATIVE = "lower"


@dataclass(frozen=True)
class Packet:
    """C-infinity bump exp(1/((x-a)(x-b))) on (a, b), scaled to peak value 1.

    ``scale`` multiplies the bump; the support lies inside one branch of E.
    """

    a: float
    b: float
    m: float = 1.0
    scale: complex = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("packet support must have b > a")
        if not (self.a > self.m or self.b < -self.m):
            raise SpectralGapError("packet support must lie inside (m, inf) or (-inf, -m)")

    @classmethod
    def from_center(cls, center: float, width: float, m: float = 1.0, scale: complex = 1.0) -> "Packet":
        return cls(center - width / 2, center + width / 2, m, scale)

    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def component(self) -> Component:
        return Component.UPPER_ON_POSITIVE if self.a > self.m else Component.LOWER_ON_NEGATIVE

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros(lam.shape, dtype=complex)
        inside = (lam > self.a) & (lam < self.b)
        x = lam[inside]
        out[inside] = self.scale * np.exp(1.0 / ((x - self.a) * (x - self.b)) + 4.0 / self.width**2)
        return out

    def components(self, lam) -> np.ndarray:
        """Two-component form in L: first component on lam > m, second on lam < -m."""
        v = self(lam)
        lam = np.asarray(lam)
        return np.array([np.where(lam > self.m, v, 0), np.where(lam < -self.m, v, 0)])

    def to_dict(self) -> dict:
        return {"center": self.center, "width": self.width, "shape": "smooth-bump", "component": self.component.value}


# --------------------------------------------------------------------------
# quadratures


@dataclass(frozen=True)
class EnergyQuadrature:
    """Nodes ``lam`` and weights ``w`` (for d lam) on one branch interval."""

    lam: np.ndarray
    w: np.ndarray

    @classmethod
    def for_interval(cls, a: float, b: float, m: float, r_extent: float, margin: float = 1.5) -> "EnergyQuadrature":
        """Trapezoid rule in eps with d_eps <= 2 pi / (margin * r_extent)."""
        sign = 1.0 if a > m else -1.0
        e1, e2 = math.sqrt(a * a - m * m), math.sqrt(b * b - m * m)
        elo, ehi = min(e1, e2), max(e1, e2)
        d = 2 * math.pi / (margin * r_extent)
        n = max(16, int(math.ceil((ehi - elo) / d)))
        eps = np.linspace(elo, ehi, n + 1)
        de = (ehi - elo) / n
        lam = sign * np.sqrt(eps**2 + m * m)
        w = de * eps / np.abs(lam)
        w[0] *= 0.5
        w[-1] *= 0.5
        order = np.argsort(lam)
        return cls(lam[order], w[order])

    @classmethod
    def for_packets(cls, packets, m: float, r_extent: float, margin: float = 1.5) -> "EnergyQuadrature":
        merged = []
        for a, b in sorted((p.a, p.b) for p in packets):
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        parts = [cls.for_interval(a, b, m, r_extent, margin) for a, b in merged]
        return cls(np.concatenate([p.lam for p in parts]), np.concatenate([p.w for p in parts]))


@dataclass(frozen=True)
class RadialQuadrature:
    r: np.ndarray
    w: np.ndarray

    @classmethod
    def panels(cls, r_cut: float = R_CUT, panel: float = 1.0, r_min: float = 1e-8, nodes: int = GL_NODES) -> "RadialQuadrature":
        x, wx = np.polynomial.legendre.leggauss(nodes)
        edges = [0.0]
        e = r_min
        while e < min(panel, r_cut):
            edges.append(e)
            e *= 4.0
        edges.extend(np.arange(panel, r_cut + 0.5 * panel, panel).tolist())
        edges = np.unique(np.array(edges))
        edges = edges[edges <= r_cut + 1e-12]
        lo, hi = edges[:-1], edges[1:]
        r = (0.5 * (hi - lo)[:, None] * (x[None, :] + 1) + lo[:, None]).ravel()
        w = (0.5 * (hi - lo)[:, None] * wx[None, :]).ravel()
        return cls(r, w)


@dataclass(frozen=True)
class RadialFunction:
    """h(r) = [h1, h2] sampled on quadrature nodes."""

    r: np.ndarray
    w: np.ndarray
    values: np.ndarray  # (2, R)

    @property
    def norm2(self) -> float:
        return float(np.sum(self.w * (np.abs(self.values[0]) ** 2 + np.abs(self.values[1]) ** 2)))

    def tail_norm2(self, r_from: float) -> float:
        m = self.r >= r_from
        return float(np.sum(self.w[m] * (np.abs(self.values[0, m]) ** 2 + np.abs(self.values[1, m]) ** 2)))

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        return RadialFunction(self.r, self.w, self.values + other.values)

    def __mul__(self, c) -> "RadialFunction":
        return RadialFunction(self.r, self.w, self.values * c)

    __rmul__ = __mul__


# --------------------------------------------------------------------------
# eigenfunction bases


class FreeBasis:
    """Eigenfunctions of the free reference operator (k = 0, v = 0)."""

    def __init__(self, m: float):
        self.m = float(m)

    def density(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return np.sqrt(np.abs((lam + self.m) / (lam - self.m))) / math.pi

    def prepare(self, lam, r) -> "PreparedBasis":
        lam = np.asarray(lam, dtype=float)
        r = np.asarray(r, dtype=float)
        eps = np.sqrt(lam**2 - self.m**2)
        beta = (self.m - lam) / eps
        ph = r[:, None] * eps[None, :]
        return PreparedBasis(lam, r, np.cos(ph), beta[None, :] * np.sin(ph), self.density(lam))


@dataclass(frozen=True)
class PreparedBasis:
    """Real eigenfunction samples f, g of shape (R, L) and the density rho(lam)."""

    lam: np.ndarray
    r: np.ndarray
    f: np.ndarray
    g: np.ndarray
    rho: np.ndarray


class PerturbedBasis:
    """Unit-amplitude regular solutions of the perturbed operator.

    ``f, g = F / |c_{1,1}|`` where F ~ r^gamma [1, b0] at the origin; the
    matching density is rho1.  Inside ``r_match`` the DOP853 solution is
    sampled; beyond it ``2 Re(alpha Phi0)`` from the Jost series is used.
    """

    def __init__(self, params: SystemParams, q: PerturbationSpec, chunk: int = 128):
        self.params = params
        self.q = q
        self.chunk = chunk

    def density(self, lam) -> np.ndarray:
        return FreeBasis(self.params.m).density(lam)

    def _prepare_chunk(self, lam: np.ndarray, r: np.ndarray, r_match: float):
        p = self.params
        inner = r <= r_match
        f = np.empty((len(r), len(lam)))
        g = np.empty((len(r), len(lam)))
        alphas, _ = regular_alpha(p, self.q, lam, r_match)
        eps = np.sqrt(lam**2 - p.m**2)
        sp = np.where(lam > -p.m, np.sqrt(np.abs(p.m + lam)) + 0j, 1j * np.sqrt(np.abs(p.m + lam)))
        amp = np.abs(2 * alphas * sp)
        if inner.any():
            ri = r[inner]
            vals, _ = perturb.integrate_regular(p, lam, self.q, np.concatenate([ri, [r_match]]) if ri[-1] < r_match else ri)
            vals = vals[:, :, : inner.sum()]
            f[inner] = (vals[:, 0, :].real / amp[:, None]).T
            g[inner] = (vals[:, 1, :].real / amp[:, None]).T
        if (~inner).any():
            ro = r[~inner]
            for j, l in enumerate(lam):
                ep = EnergyPoint(l, p.m, p.k, p.A)
                js = coulomb.jost_series(p, ep, order=40)
                Phi = js(ro)
                Z = 2 * (alphas[j] * Phi).real / amp[j]
                f[~inner, j] = Z[0]
                g[~inner, j] = Z[1]
        return f, g, amp

    def prepare(self, lam, r, r_match: float | None = None) -> PreparedBasis:
        lam = np.asarray(lam, dtype=float)
        r = np.asarray(r, dtype=float)
        order = np.argsort(r)
        if np.any(np.diff(r[order]) <= 0):
            raise ValueError("radial nodes must be distinct")
        rs = r[order]
        if r_match is None:
            eps_min = float(np.sqrt(lam**2 - self.params.m**2).min())
            from .scatter import match_radius

            r_match = match_radius(self.params, self.q, eps_min)
        f = np.empty((len(r), len(lam)))
        g = np.empty((len(r), len(lam)))
        amps = np.empty(len(lam))
        for s in range(0, len(lam), self.chunk):
            sl = slice(s, s + self.chunk)
            fc, gc, amp = self._prepare_chunk(lam[sl], rs, r_match)
            f[order, sl] = fc
            g[order, sl] = gc
            amps[sl] = amp
        self.last_amplitudes = amps
        return PreparedBasis(lam, r, f, g, self.density(lam))


# --------------------------------------------------------------------------
# transforms


@dataclass
class SpectralTransform:
    """Forward/inverse transform pair on fixed energy and radial quadratures."""

    basis: object
    equad: EnergyQuadrature
    rquad: RadialQuadrature
    prepared: PreparedBasis = field(init=False, repr=False)

    def __post_init__(self):
        self.prepared = self.basis.prepare(self.equad.lam, self.rquad.r)

    @classmethod
    def build(cls, basis, packets, r_cut: float = R_CUT, margin: float = 1.5, panel: float = 1.0) -> "SpectralTransform":
        m = basis.m if isinstance(basis, FreeBasis) else basis.params.m
        eq = EnergyQuadrature.for_packets(packets, m, r_cut, margin)
        rq = RadialQuadrature.panels(r_cut, panel)
        return cls(basis, eq, rq)

    @property
    def lam(self) -> np.ndarray:
        return self.equad.lam

    def forward_values(self, F: np.ndarray) -> RadialFunction:
        """h = U F for F sampled on the energy nodes."""
        pb = self.prepared
        c = np.asarray(F) * pb.rho * self.equad.w
        return RadialFunction(self.rquad.r, self.rquad.w, np.array([pb.f @ c, pb.g @ c]))

    def forward(self, packet) -> RadialFunction:
        return self.forward_values(packet(self.lam))

    def inverse_on_nodes(self, h: RadialFunction) -> np.ndarray:
        """U^{-1} h evaluated on the energy nodes."""
        pb = self.prepared
        hw = h.values * h.w[None, :]
        return hw[0] @ pb.f + hw[1] @ pb.g

    def inverse_at(self, h: RadialFunction, lam) -> np.ndarray:
        """U^{-1} h at arbitrary energies (prepares the basis there)."""
        pb = self.basis.prepare(np.atleast_1d(lam), h.r)
        hw = h.values * h.w[None, :]
        return hw[0] @ pb.f + hw[1] @ pb.g

    def parseval(self, F: np.ndarray) -> tuple[float, float]:
        """(int |F|^2 rho dlam, int |h|^2 dr) for h = U F."""
        lhs = float(np.sum(np.abs(F) ** 2 * self.prepared.rho * self.equad.w))
        return lhs, self.forward_values(F).norm2


def truncation_estimate(h: RadialFunction, window: float = 20.0) -> float:
    """Relative L2 mass in the last ``window`` of the radial range (tail proxy)."""
    tot = h.norm2
    return h.tail_norm2(h.r[-1] - window) / tot if tot > 0 else 0.0


def u0_forward(packet: Packet, r_cut: float = R_CUT) -> tuple[RadialFunction, SpectralTransform]:
    tr = SpectralTransform.build(FreeBasis(packet.m), [packet], r_cut)
    return tr.forward(packet), tr


def u0_inverse(h: RadialFunction, lam, m: float = 1.0, tail_tol: float = 1e-12) -> np.ndarray:
    if truncation_estimate(h) > tail_tol:
        raise TruncationError("radial function has not decayed at the truncation radius", truncation_estimate(h))
    pb = FreeBasis(m).prepare(np.atleast_1d(lam), h.r)
    hw = h.values * h.w[None, :]
    return hw[0] @ pb.f + hw[1] @ pb.g


def u_forward(params: SystemParams, q: PerturbationSpec, packet: Packet, r_cut: float = R_CUT) -> tuple[RadialFunction, SpectralTransform]:
    tr = SpectralTransform.build(PerturbedBasis(params, q), [packet], r_cut)
    return tr.forward(packet), tr


def u_inverse(params: SystemParams, q: PerturbationSpec, h: RadialFunction, lam, tail_tol: float = 1e-12) -> np.ndarray:
    if truncation_estimate(h) > tail_tol:
        raise TruncationError("radial function has not decayed at the truncation radius", truncation_estimate(h))
    pb = PerturbedBasis(params, q).prepare(np.atleast_1d(lam), h.r)
    hw = h.values * h.w[None, :]
    return hw[0] @ pb.f + hw[1] @ pb.g


def apply_operator(params: SystemParams, q: PerturbationSpec, h_of_r, r, step: float = 1e-2) -> np.ndarray:
    """Differential expression of the operator applied to h by 5-point differences.

    (L h) = [-h2' + (k/r) h2 + (m + v) h1,  h1' + (k/r) h1 + (v - m) h2].
    ``h_of_r`` maps radii to a (2, N) array.
    """
    r = np.asarray(r, dtype=float)
    k = 0.0 if params.free else params.k
    d = (-h_of_r(r + 2 * step) + 8 * h_of_r(r + step) - 8 * h_of_r(r - step) + h_of_r(r - 2 * step)) / (12 * step)
    h = h_of_r(r)
    v = -params.A / r + q(r)
    return np.array([-d[1] + k / r * h[1] + (params.m + v) * h[0], d[0] + k / r * h[0] + (v - params.m) * h[1]])
