"""Orthogonal polynomials on the real line.

Recurrence convention (orthonormal, probability measure):

    a_{n+1} p_{n+1}(x) = (x - b_{n+1}) p_n(x) - a_n p_{n-1}(x),
    p_{-1} = 0, p_0 = 1,  a_n > 0.

Second-kind polynomials use the same recurrence with q_0 = 0, q_1 = 1/a_1.
Coefficients come from a quadrature discretization of the measure followed by
Lanczos tridiagonalization with full reorthogonalization.  Zeros are computed
by Sturm-sequence bisection on the truncated Jacobi matrix: deterministic
accuracy and no ordering ambiguity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .limit_kernels import DIAGONAL_SWITCH, KernelSample

__all__ = [
    "RecurrenceCoeffs",
    "PolyValues",
    "SupportTooSmallError",
    "PositivityLossError",
    "ZeroDiagonalError",
    "stieltjes_coeffs",
    "eval_polys",
    "cd_kernel",
    "interp_kernel",
    "kernel_diag",
    "rescaled_cd",
    "nevai_ratio",
    "poly_zeros",
]

_RESCALE_LIMIT = 1e280


class SupportTooSmallError(ValueError):
    """Discretized support has too few points for the requested degree."""


class PositivityLossError(RuntimeError):
    """Lanczos lost positivity of an off-diagonal coefficient."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"a_{index} lost positivity (ill-conditioned discretization)")


class ZeroDiagonalError(ValueError):
    """K(index, xi, xi) vanished; cannot rescale."""


@dataclass(frozen=True)
class RecurrenceCoeffs:
    a: np.ndarray  # a_1 .. a_N
    b: np.ndarray  # b_1 .. b_N
    source: str = ""
    mass_factor: float = 1.0  # original total mass before normalization

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.shape != b.shape:
            raise ValueError("a and b must have equal length")
        if np.any(a <= 0):
            raise ValueError("all a_n must be > 0")

    def __len__(self):
        return self.a.size


@dataclass(frozen=True)
class PolyValues:
    z: complex
    values: np.ndarray  # p_0(z) .. p_n(z), times exp(log_scale)
    q_values: np.ndarray | None = None
    log_scale: float = 0.0


# ---------------------------------------------------------------------------
# Stieltjes / Lanczos
# ---------------------------------------------------------------------------

def _discretize(mu, n_max, node_factor):
    """Nodes/weights representing mu, exact enough for degree-2*n_max moments."""
    from .measures import _piece_nodes, _subst_exponent  # shared quadrature plumbing

    xs = [mu.atom_positions]
    ws = [mu.atom_masses]
    total_len = sum(p.b - p.a for p in mu.pieces)
    for p in mu.pieces:
        share = (p.b - p.a) / total_len if total_len > 0 else 0.0
        base = int(math.ceil(node_factor * n_max * share / 2.0)) + 8
        ka = _subst_exponent(p.singular_exponents[0])
        kb = _subst_exponent(p.singular_exponents[1])
        # per-half counts large enough that polynomially-substituted integrands
        # of degree 2*n_max + 1 are integrated exactly
        n_half = max(base, max(ka, kb) * (n_max + 2) + 8)
        x, w = _piece_nodes(p, p.a, p.b, n_half)
        xs.append(x)
        ws.append(w)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    order = np.argsort(x, kind="stable")
    return x[order], np.real(w[order])


def _lanczos(x, w, m):
    """m steps of Lanczos on diag(x) with start sqrt(w), full reorthogonalization."""
    n_nodes = x.size
    Q = np.empty((m + 1, n_nodes))
    q = np.sqrt(w)
    q /= np.linalg.norm(q)
    Q[0] = q
    a = np.empty(m)
    b = np.empty(m)
    for k in range(m):
        v = x * Q[k]
        b[k] = Q[k] @ v
        v -= b[k] * Q[k]
        if k > 0:
            v -= a[k - 1] * Q[k - 1]
        for _ in range(2):  # classical Gram-Schmidt, twice
            c = Q[: k + 1] @ v
            v -= Q[: k + 1].T @ c
        nb = np.linalg.norm(v)
        if not nb > 1e-14:
            raise PositivityLossError(k + 1)
        a[k] = nb
        Q[k + 1] = v / nb
    return a, b


def stieltjes_coeffs(mu, n_max, node_factor=20):
    """Recurrence coefficients (a_1..a_n, b_1..b_n) of the measure.

    The measure is normalized to unit mass internally; the original mass is
    recorded on the result.  Requires > n_max support points after
    discretization.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    x, w = _discretize(mu, n_max, node_factor)
    keep = w > 0
    x, w = x[keep], w[keep]
    if x.size <= n_max:
        raise SupportTooSmallError(
            f"support has {x.size} points after discretization; need > {n_max}"
        )
    total = float(w.sum())
    a, b = _lanczos(x, w / total, n_max)
    if mu.is_even():
        b[:] = 0.0  # exact for even measures; removes roundoff drift
    return RecurrenceCoeffs(a=a, b=b, source=mu.name or "measure", mass_factor=total)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_polys(rec, n, z, second_kind=False):
    """p_0(z)..p_n(z) by forward recurrence (optionally second kind too).

    If values exceed 1e280 in modulus, the whole sequence is rescaled by a
    common factor and log_scale records its logarithm.
    """
    if n > len(rec):
        raise ValueError(f"n = {n} exceeds declared length {len(rec)}")
    z = complex(z)
    a, b = rec.a, rec.b
    p = np.empty(n + 1, dtype=complex)
    p[0] = 1.0
    q = np.empty(n + 1, dtype=complex) if second_kind else None
    if second_kind:
        q[0] = 0.0
    log_scale = 0.0
    for k in range(1, n + 1):
        prev2 = p[k - 2] if k >= 2 else 0.0
        p[k] = ((z - b[k - 1]) * p[k - 1] - (a[k - 2] * prev2 if k >= 2 else 0.0)) / a[k - 1]
        if second_kind:
            if k == 1:
                q[1] = 1.0 / a[0]
            else:
                q[k] = ((z - b[k - 1]) * q[k - 1] - a[k - 2] * q[k - 2]) / a[k - 1]
        top = abs(p[k])
        if second_kind:
            top = max(top, abs(q[k]))
        if top > _RESCALE_LIMIT:
            p[: k + 1] *= 1.0 / _RESCALE_LIMIT
            if second_kind:
                q[: k + 1] *= 1.0 / _RESCALE_LIMIT
            log_scale += math.log(_RESCALE_LIMIT)
    return PolyValues(z=z, values=p, q_values=q, log_scale=log_scale)


def _batch_levels(rec, levels, zs):
    """(p_{n-1}, p_n, p'_{n-1}, p'_n) at each requested level, vectorized in z."""
    levels = sorted(set(int(v) for v in levels))
    if levels and levels[-1] > len(rec):
        raise ValueError(f"level {levels[-1]} exceeds declared length {len(rec)}")
    zs = np.asarray(zs, dtype=complex)
    a, b = rec.a, rec.b
    p_prev = np.zeros_like(zs)
    p = np.ones_like(zs)
    dp_prev = np.zeros_like(zs)
    dp = np.zeros_like(zs)
    out = {}
    if levels and levels[0] == 0:
        out[0] = (p_prev.copy(), p.copy(), dp_prev.copy(), dp.copy())
    top = levels[-1] if levels else 0
    for k in range(1, top + 1):
        ak, bk = a[k - 1], b[k - 1]
        am = a[k - 2] if k >= 2 else 0.0
        p_next = ((zs - bk) * p - am * p_prev) / ak
        dp_next = (p + (zs - bk) * dp - am * dp_prev) / ak
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
        if k in levels:
            out[k] = (p_prev.copy(), p.copy(), dp_prev.copy(), dp.copy())
    return out


def _cd_from_values(an, pn_z, pm_z, pn_w, pm_w, z, w):
    return an * (pn_z * np.conj(pm_w) - pm_z * np.conj(pn_w)) / (z - np.conj(w))


def _cd_confluent(an, pn, pm, dpn, dpm):
    # limit of the CD formula as conj(w) -> z
    return an * (dpn * pm - dpm * pn)


def cd_kernel(rec, n, z, w, method="cd_formula"):
    """K(n,z,w) = sum_{j<n} p_j(z) conj(p_j(w)); n >= 1.

    method "sum" sums the series; "cd_formula" uses the Christoffel-Darboux
    identity with a derivative branch near the diagonal.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z, w = complex(z), complex(w)
    if method == "sum":
        pv_z = eval_polys(rec, n - 1, z)
        pv_w = eval_polys(rec, n - 1, w)
        s = np.sum(pv_z.values * np.conj(pv_w.values))
        return complex(s * math.exp(pv_z.log_scale + pv_w.log_scale))
    if method != "cd_formula":
        raise ValueError(f"unknown method {method!r}")
    an = rec.a[n - 1]
    if abs(z - w.conjugate()) < DIAGONAL_SWITCH:
        zeta = (z + w.conjugate()) / 2.0
        lev = _batch_levels(rec, [n], [zeta])[n]
        pm, pn, dpm, dpn = lev[0][0], lev[1][0], lev[2][0], lev[3][0]
        return complex(_cd_confluent(an, pn, pm, dpn, dpm))
    lev = _batch_levels(rec, [n], [z, w])[n]
    pm, pn = lev[0], lev[1]
    return complex(_cd_from_values(an, pn[0], pm[0], pn[1], pm[1], z, w))


def interp_kernel(rec, t, z, w):
    """Piecewise-linear-in-t kernel; K(0,.,.) = 0, integers match cd_kernel."""
    if t < 0:
        raise ValueError("t must be >= 0")
    n = int(math.floor(t))
    s = t - n
    k_lo = 0.0 if n == 0 else cd_kernel(rec, n, z, w)
    if s == 0.0:
        return complex(k_lo)
    k_hi = cd_kernel(rec, n + 1, z, w)
    return complex(k_lo + s * (k_hi - k_lo))


def kernel_diag(rec, index, xi):
    """K(index, xi, xi) for integer or real (interpolated) index."""
    xi = float(xi)
    n = int(math.floor(index))
    s = index - n
    top = n if s == 0.0 else n + 1
    pv = eval_polys(rec, max(top - 1, 0), xi)
    sq = np.abs(pv.values) ** 2 * math.exp(2.0 * pv.log_scale)
    cum = np.concatenate([[0.0], np.cumsum(sq)])  # cum[m] = K(m, xi, xi)
    if s == 0.0:
        return float(cum[n])
    return float(cum[n] + s * (cum[n + 1] - cum[n]))


def rescaled_cd(rec, xi, h, index, grid):
    """Samples of K(index, xi + z/tau, xi + w/tau) / K(index, xi, xi),
    tau = h(K(index, xi, xi)) -- the exact left-hand side of the scaling
    limits."""
    kd = kernel_diag(rec, index, xi)
    if not kd > 0:
        raise ZeroDiagonalError(f"K({index}, {xi}, {xi}) = {kd}")
    tau = float(h(kd))
    pairs = [(complex(z), complex(w)) for z, w in grid]
    pts = sorted({p for zw in pairs for p in zw}, key=lambda c: (c.real, c.imag))
    pt_index = {p: i for i, p in enumerate(pts)}
    zs = xi + np.array(pts, dtype=complex) / tau

    n = int(math.floor(index))
    s = index - n
    levels = [n] if s == 0.0 else [n, n + 1]
    levels = [lv for lv in levels if lv >= 0]
    batch = _batch_levels(rec, [lv for lv in levels if lv > 0], zs)

    def level_value(lv, iz, iw, z_s, w_s):
        if lv == 0:
            return 0.0 + 0.0j
        pm, pn, dpm, dpn = batch[lv]
        an = rec.a[lv - 1]
        if abs(z_s - w_s.conjugate()) < DIAGONAL_SWITCH:
            return _cd_confluent(an, pn[iz], pm[iz], dpn[iz], dpm[iz])
        return _cd_from_values(an, pn[iz], pm[iz], pn[iw], pm[iw], z_s, w_s)

    out = []
    for z, w in pairs:
        iz, iw = pt_index[z], pt_index[w]
        z_s, w_s = zs[iz], zs[iw]
        val = level_value(levels[0], iz, iw, z_s, w_s)
        if s != 0.0:
            val_hi = level_value(levels[-1], iz, iw, z_s, w_s)
            val = val + s * (val_hi - val)
        out.append(KernelSample(z=z, w=w, value=complex(val) / kd))
    return out


def nevai_ratio(rec, xi, n):
    """K(n+1, xi, xi) / K(n, xi, xi)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pv = eval_polys(rec, n, xi)
    sq = np.abs(pv.values) ** 2
    return float(1.0 + sq[n] / np.sum(sq[:n]))


# ---------------------------------------------------------------------------
# zeros
# ---------------------------------------------------------------------------

def _sturm_counts(d, e_sq, shifts):
    """Number of eigenvalues of tridiag(d, e) strictly below each shift.

    Exactly-zero pivots are perturbed to -tiny before being counted, keeping
    the count monotone in the shift.
    """
    shifts = np.asarray(shifts, dtype=float)
    tiny = 1e-300
    q = d[0] - shifts
    q = np.where(q == 0.0, -tiny, q)
    count = (q < 0).astype(int)
    for i in range(1, d.size):
        q = d[i] - shifts - e_sq[i - 1] / q
        q = np.where(q == 0.0, -tiny, q)
        count += q < 0
    return count


def poly_zeros(rec, n, tol=1e-13):
    """All n zeros of p_n: eigenvalues of the truncated Jacobi matrix by
    Sturm-sequence bisection; strictly increasing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > len(rec):
        raise ValueError(f"n = {n} exceeds declared length {len(rec)}")
    d = rec.b[:n].astype(float)
    if n == 1:
        return d.copy()
    e = rec.a[: n - 1].astype(float)
    e_sq = e * e
    pad = np.concatenate([[0.0], np.abs(e), [0.0]])
    radius = pad[:-1] + pad[1:]
    lo0 = float(np.min(d - radius)) - 1.0
    hi0 = float(np.max(d + radius)) + 1.0
    ks = np.arange(1, n + 1)
    lo = np.full(n, lo0)
    hi = np.full(n, hi0)
    for _ in range(200):
        if float(np.max(hi - lo)) <= tol:
            break
        mid = 0.5 * (lo + hi)
        c = _sturm_counts(d, e_sq, mid)
        take_hi = c >= ks
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
    return 0.5 * (lo + hi)
