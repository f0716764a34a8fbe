"""Measures on the line (and angle measures on the circle), their local mass
asymptotics, regularly varying scaling functions, Cauchy transforms, and the
gallery of example measures used by the experiments.

Interval convention is half-open [a, b) throughout: an atom at a counts, an
atom at b does not.  AC pieces carry endpoint singularity exponents > -1; all
quadrature goes through a power substitution that removes (or tames) the
endpoint singularity before Gauss-Legendre panels are applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "AcPiece",
    "Measure",
    "RegVarFn",
    "LocalScalingEstimate",
    "LocalScalingError",
    "AtomAtPointError",
    "QuadratureError",
    "mass",
    "local_scaling",
    "asymptotic_inverse",
    "cauchy_transform",
    "regularized_cauchy",
    "gallery",
    "gallery_names",
]


class QuadratureError(RuntimeError):
    """Panel doubling failed to stabilize the integral."""


class AtomAtPointError(ValueError):
    """local_scaling requires mu({xi}) = 0."""


class LocalScalingError(RuntimeError):
    """No regularly varying fit found (says nothing about tangent measures)."""


@dataclass(frozen=True)
class AcPiece:
    """Absolutely continuous piece w(x) dx on [a, b].

    singular_exponents = (ga, gb) declares w(x) ~ C (x-a)^ga near a and
    ~ C (b-x)^gb near b, both > -1 (integrable).  quadrature_panels is the
    starting panel count for adaptive integration.
    """

    a: float
    b: float
    weight: Callable[[np.ndarray], np.ndarray]
    singular_exponents: tuple = (0.0, 0.0)
    quadrature_panels: int = 4

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("piece needs a < b")
        if min(self.singular_exponents) <= -1:
            raise ValueError("singularity exponents must be > -1")


@dataclass(frozen=True)
class Measure:
    atom_positions: np.ndarray = field(default_factory=lambda: np.empty(0))
    atom_masses: np.ndarray = field(default_factory=lambda: np.empty(0))
    pieces: tuple = ()
    name: str = ""

    def __post_init__(self):
        pos = np.asarray(self.atom_positions, dtype=float)
        mas = np.asarray(self.atom_masses, dtype=float)
        object.__setattr__(self, "atom_positions", pos)
        object.__setattr__(self, "atom_masses", mas)
        if pos.shape != mas.shape:
            raise ValueError("atom positions/masses shape mismatch")
        if pos.size and not np.all(np.diff(pos) > 0):
            raise ValueError("atom positions must be strictly increasing")
        if np.any(mas <= 0):
            raise ValueError("atom masses must be > 0")

    @property
    def total_mass(self):
        out = float(self.atom_masses.sum())
        for p in self.pieces:
            out += _integrate_piece(p, p.a, p.b)
        return out

    def is_even(self, tol=0.0):
        """True when atoms and pieces are mirror images under x -> -x."""
        pos, mas = self.atom_positions, self.atom_masses
        if pos.size:
            if not np.allclose(pos, -pos[::-1], atol=tol) or not np.allclose(mas, mas[::-1]):
                return False
        by_interval = {(p.a, p.b): p for p in self.pieces}
        if sorted(by_interval) != sorted((-p.b, -p.a) for p in self.pieces):
            return False
        for p in self.pieces:
            mirror = by_interval[(-p.b, -p.a)]
            x = np.linspace(p.a + (p.b - p.a) * 1e-3, p.b - (p.b - p.a) * 1e-3, 17)
            if not np.allclose(p.weight(x), mirror.weight(-x), rtol=1e-10, atol=1e-300):
                return False
        return True


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def _subst_exponent(gamma):
    """Power k for the substitution x = edge + u^k removing (x-edge)^gamma.

    Transformed integrand gains the factor k u^{k(1+gamma)-1}; k is the
    smallest integer <= 8 making that exponent an integer (polynomial case),
    otherwise the smallest making it >= 2 (enough smoothness for GL panels).
    """
    if gamma == 0.0:
        return 1
    for k in range(1, 9):
        e = k * (1.0 + gamma) - 1.0
        if abs(e - round(e)) < 1e-9 and e > -1e-9:
            return k
    return max(1, math.ceil(3.0 / (1.0 + gamma)))


def _half_nodes(piece, lo, hi, edge, gamma, n):
    """Nodes/weights for int_lo^hi w(x) dx on a half adjacent to `edge`."""
    k = _subst_exponent(gamma)
    sgn = 1.0 if edge <= lo else -1.0  # edge is the left end if sgn > 0
    u_lo = abs(lo - edge) ** (1.0 / k)
    u_hi = abs(hi - edge) ** (1.0 / k)
    if sgn < 0:
        u_lo, u_hi = abs(hi - edge) ** (1.0 / k), abs(lo - edge) ** (1.0 / k)
    t, wq = _leggauss(n)
    u = 0.5 * (u_hi - u_lo) * t + 0.5 * (u_hi + u_lo)
    du = 0.5 * (u_hi - u_lo) * wq
    x = edge + sgn * u ** k
    jac = k * u ** (k - 1)
    vals = piece.weight(x)
    return x, vals * jac * du


def _piece_nodes(piece, lo, hi, n_half):
    """Discretization (nodes, weights >= 0) of w dx restricted to [lo, hi]."""
    lo = max(lo, piece.a)
    hi = min(hi, piece.b)
    if not lo < hi:
        return np.empty(0), np.empty(0)
    mid = 0.5 * (piece.a + piece.b)
    ga, gb = piece.singular_exponents
    xs, ws = [], []
    if lo < min(mid, hi):
        x, w = _half_nodes(piece, lo, min(mid, hi), piece.a, ga, n_half)
        xs.append(x)
        ws.append(w)
    if max(mid, lo) < hi:
        x, w = _half_nodes(piece, max(mid, lo), hi, piece.b, gb, n_half)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _integrate_piece(piece, lo, hi, f=None, rtol=1e-10, max_doublings=12):
    """Adaptive integral of f(x) w(x) dx over [lo,hi]; panels doubled until
    two refinements agree to rtol."""
    lo = max(lo, piece.a)
    hi = min(hi, piece.b)
    if not lo < hi:
        return 0.0
    n = max(16, piece.quadrature_panels * 8)
    prev = None
    for _ in range(max_doublings):
        x, w = _piece_nodes(piece, lo, hi, n)
        cur = np.sum(w * (1.0 if f is None else f(x)))
        if prev is not None and abs(cur - prev) <= rtol * (1.0 + abs(cur)):
            return cur
        prev = cur
        n *= 2
    raise QuadratureError(f"integral over [{lo}, {hi}] did not stabilize")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def mass(mu, a, b):
    """mu([a, b)): atoms at positions in [a,b) plus the AC mass."""
    if not a < b:
        raise ValueError("need a < b")
    pos, mas = mu.atom_positions, mu.atom_masses
    out = 0.0
    if pos.size:
        out += float(mas[(pos >= a) & (pos < b)].sum())
    for p in mu.pieces:
        out += float(np.real(_integrate_piece(p, a, b)))
    return out


def _mass_open_open(mu, a, b):
    """mu((a, b)) = mu([a,b)) minus an atom exactly at a."""
    out = mass(mu, a, b)
    pos, mas = mu.atom_positions, mu.atom_masses
    hit = pos == a
    if hit.any():
        out -= float(mas[hit].sum())
    return out


@dataclass(frozen=True)
class LocalScalingEstimate:
    xi: float
    beta_hat: float
    sigma_minus_hat: float
    sigma_plus_hat: float
    fit_residual: float


def local_scaling(mu, xi, r_grid):
    """Regular-variation fit of the one-sided masses of mu around xi.

    beta_hat is the least-squares slope of log(1/[mu((xi-1/r,xi)) + mu([xi,xi+1/r))])
    against log r; sigma_hat_pm are means of r^beta_hat * one-sided mass over
    the top decade of r (normalization g(r) = r^beta).
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size < 4 or not np.all(np.diff(r_grid) > 0):
        raise ValueError("r_grid must be increasing with >= 4 points")
    if r_grid[-1] / r_grid[0] < 1e3:
        raise ValueError("r_grid must span at least 3 decades")
    if (mu.atom_positions == xi).any():
        raise AtomAtPointError(f"atom at xi = {xi}")

    m_minus = np.array([_mass_open_open(mu, xi - 1.0 / r, xi) for r in r_grid])
    m_plus = np.array([mass(mu, xi, xi + 1.0 / r) for r in r_grid])
    total = m_minus + m_plus
    ok = total > 0
    if not ok.any():
        raise LocalScalingError("zero mass on all scales; no regularly varying fit found")
    x = np.log(r_grid[ok])
    y = np.log(1.0 / total[ok])
    beta_hat, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(np.polyval([beta_hat, intercept], x) - y)))
    if beta_hat <= 0:
        raise LocalScalingError("fitted index is not positive; no regularly varying fit found")
    top = r_grid >= r_grid[-1] / 10.0
    g = r_grid[top] ** beta_hat
    return LocalScalingEstimate(
        xi=float(xi),
        beta_hat=float(beta_hat),
        sigma_minus_hat=float(np.mean(g * m_minus[top])),
        sigma_plus_hat=float(np.mean(g * m_plus[top])),
        fit_residual=residual,
    )


@dataclass(frozen=True)
class RegVarFn:
    """g(r) = scale * r^index * log(e + r)^log_exponent."""

    scale: float = 1.0
    index: float = 1.0
    log_exponent: float = 0.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be > 0")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = self.scale * r ** self.index * np.log(np.e + r) ** self.log_exponent
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class _InverseRegVar:
    """Asymptotic inverse of a RegVarFn with a log factor.

    Fixed-point iterations of r <- (t/(scale log(e+r)^gamma))^(1/beta) from
    the seed r = (t/scale)^(1/beta); three iterations are needed to bring the
    g(r) = r log(e+r) round trip within 1% at r = 1e6.
    """

    g: RegVarFn

    @property
    def index(self):
        return 1.0 / self.g.index

    @property
    def scale(self):
        return self.g.scale ** (-1.0 / self.g.index)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        beta, s, gam = self.g.index, self.g.scale, self.g.log_exponent
        r = (t / s) ** (1.0 / beta)
        for _ in range(3):
            r = (t / (s * np.log(np.e + r) ** gam)) ** (1.0 / beta)
        return float(r) if r.ndim == 0 else r


def asymptotic_inverse(g):
    """h with h(g(r))/r -> 1; exact power inverse when g has no log factor."""
    if g.index <= 0:
        raise ValueError("asymptotic inverse needs index > 0")
    if g.log_exponent == 0.0:
        return RegVarFn(scale=g.scale ** (-1.0 / g.index), index=1.0 / g.index)
    return _InverseRegVar(g)


def cauchy_transform(mu, z):
    """m(z) = int dmu(t) / (t - z), Im z != 0."""
    z = complex(z)
    if z.imag == 0.0:
        raise ValueError("cauchy_transform needs Im z != 0")
    out = 0.0 + 0.0j
    if mu.atom_positions.size:
        out += np.sum(mu.atom_masses / (mu.atom_positions - z))
    for p in mu.pieces:
        out += _integrate_piece(p, p.a, p.b, f=lambda t: 1.0 / (t - z))
    return complex(out)


def norm_kappa(mu, kappa):
    """||mu||_kappa = int dmu / (1+t^2)^(kappa+1)."""
    out = 0.0
    if mu.atom_positions.size:
        out += float(np.sum(mu.atom_masses / (1.0 + mu.atom_positions ** 2) ** (kappa + 1)))
    for p in mu.pieces:
        out += float(np.real(_integrate_piece(p, p.a, p.b,
                                              f=lambda t: (1.0 + t * t) ** (-(kappa + 1.0)))))
    return out


def regularized_cauchy(mu, p_coeffs, kappa, z):
    """p(z) + (1+z^2)^(kappa+1) int (t-z)^{-1} (1+t^2)^{-(kappa+1)} dmu(t).

    p_coeffs are real polynomial coefficients, lowest degree first.
    """
    if kappa < 0 or kappa != int(kappa):
        raise ValueError("kappa must be a nonnegative integer")
    kappa = int(kappa)
    p_coeffs = np.asarray(p_coeffs, dtype=float)
    nk = norm_kappa(mu, kappa)
    if not math.isfinite(nk):
        raise ValueError(f"||mu||_{kappa} is not finite")
    deg = len(p_coeffs) - 1 if p_coeffs.size else -1
    while deg >= 0 and p_coeffs[deg] == 0.0:
        deg -= 1
    if deg > 2 * kappa + 1:
        raise ValueError(f"deg p = {deg} exceeds 2*kappa+1 = {2 * kappa + 1}")
    lead = p_coeffs[2 * kappa + 1] if len(p_coeffs) > 2 * kappa + 1 else 0.0
    if lead < nk - 1e-12:
        raise ValueError(
            f"leading coefficient condition fails: p^(2k+1)(0)/(2k+1)! = {lead} < ||mu||_k = {nk}"
        )
    z = complex(z)
    out = complex(np.polyval(p_coeffs[::-1], z)) if p_coeffs.size else 0.0 + 0.0j
    integ = 0.0 + 0.0j
    if mu.atom_positions.size:
        t = mu.atom_positions
        integ += np.sum(mu.atom_masses / ((t - z) * (1.0 + t * t) ** (kappa + 1)))
    for p in mu.pieces:
        integ += _integrate_piece(
            p, p.a, p.b, f=lambda t: 1.0 / ((t - z) * (1.0 + t * t) ** (kappa + 1.0))
        )
    return out + (1.0 + z * z) ** (kappa + 1) * integ


# ---------------------------------------------------------------------------
# gallery
# ---------------------------------------------------------------------------

def _pure_point_bulk(cutoff=100000):
    """Atoms of mass 1/(j(j+1)) at +-1/j, j <= cutoff; truncation mass 1/cutoff
    per side is dropped."""
    cutoff = int(cutoff)
    j = np.arange(1, cutoff + 1, dtype=float)
    m = 1.0 / (j * (j + 1.0))
    pos = np.concatenate([-1.0 / j, (1.0 / j)[::-1]])
    masses = np.concatenate([m, m[::-1]])
    return Measure(pos, masses, name=f"pure_point_bulk(cutoff={cutoff})")


def _power_hard_edge(beta=1.5):
    beta = float(beta)
    if beta <= 0:
        raise ValueError("beta must be > 0")
    piece = AcPiece(0.0, 1.0, lambda x: beta * x ** (beta - 1.0),
                    singular_exponents=(beta - 1.0, 0.0))
    return Measure(pieces=(piece,), name=f"power_hard_edge(beta={beta})")


def _even_fh(beta=1.5):
    """Even weight (beta/2)|x|^(beta-1) on [-1,1]; nu([0,t)) = t^beta/2."""
    beta = float(beta)
    if beta <= 0:
        raise ValueError("beta must be > 0")
    w = lambda x: (beta / 2.0) * np.abs(x) ** (beta - 1.0)
    left = AcPiece(-1.0, 0.0, w, singular_exponents=(0.0, beta - 1.0))
    right = AcPiece(0.0, 1.0, w, singular_exponents=(beta - 1.0, 0.0))
    return Measure(pieces=(left, right), name=f"even_fh(beta={beta})")


def _chebyshev():
    piece = AcPiece(-1.0, 1.0, lambda x: 1.0 / (math.pi * np.sqrt(1.0 - x * x)),
                    singular_exponents=(-0.5, -0.5))
    return Measure(pieces=(piece,), name="chebyshev")


def _legendre():
    piece = AcPiece(-1.0, 1.0, lambda x: np.full_like(x, 0.5))
    return Measure(pieces=(piece,), name="legendre")


def _jump(sigma_minus=0.5, sigma_plus=1.0):
    sm, sp = float(sigma_minus), float(sigma_plus)
    if sm < 0 or sp < 0 or sm + sp == 0:
        raise ValueError("need sigma+- >= 0, not both zero")
    pieces = []
    if sm > 0:
        pieces.append(AcPiece(-1.0, 0.0, lambda x, c=sm: np.full_like(x, c)))
    if sp > 0:
        pieces.append(AcPiece(0.0, 1.0, lambda x, c=sp: np.full_like(x, c)))
    return Measure(pieces=tuple(pieces), name=f"jump({sm},{sp})")


def _circle_lebesgue():
    """Normalized arc length, parameterized by angle on [-pi, pi)."""
    piece = AcPiece(-math.pi, math.pi, lambda t: np.full_like(t, 1.0 / (2.0 * math.pi)))
    return Measure(pieces=(piece,), name="circle_lebesgue")


def _circle_jump(sigma_minus=0.5, sigma_plus=1.0):
    """Angle measure with a jump at angle 0, normalized to a probability."""
    sm, sp = float(sigma_minus), float(sigma_plus)
    if sm <= 0 or sp <= 0:
        raise ValueError("circle_jump needs sigma+- > 0")
    tot = math.pi * (sm + sp)
    left = AcPiece(-math.pi, 0.0, lambda t, c=sm / tot: np.full_like(t, c))
    right = AcPiece(0.0, math.pi, lambda t, c=sp / tot: np.full_like(t, c))
    return Measure(pieces=(left, right), name=f"circle_jump({sm},{sp})")


_GALLERY = {
    "pure_point_bulk": _pure_point_bulk,
    "power_hard_edge": _power_hard_edge,
    "even_fh": _even_fh,
    "chebyshev": _chebyshev,
    "legendre": _legendre,
    "jump": _jump,
    "circle_lebesgue": _circle_lebesgue,
    "circle_jump": _circle_jump,
}


def gallery_names():
    return sorted(_GALLERY)


def gallery(name, **params):
    """Construct a named example measure."""
    try:
        builder = _GALLERY[name]
    except KeyError:
        raise ValueError(f"unknown gallery measure {name!r}; known: {gallery_names()}") from None
    return builder(**params)
