"""Canonical systems: transfer matrices, reproducing kernels, Weyl functions,
weighted rescaling, and the Jacobi / circle / Schrodinger embeddings.

Transfer matrices solve d/dt W(t,z) J = z W(t,z) H(t), W(0,z) = I, with
J = [[0,-1],[1,0]].  Only piecewise-constant Hamiltonians are represented, so
each piece contributes the exact factor

    W_piece = cos(l z sqrt(d)) I + l z sinc(l z sqrt(d)) H0 J^{-1},
    d = det H0,

which for rank-one pieces (d = 0) degenerates to the linear polynomial
I - l z e e^T J.  Products run left to right in increasing t.  The Weyl
orientation is fixed once: q = lim_t W(t,z) * i under the fractional linear
action; the J-increasing (mathematical physics) convention is reachable only
through W = T^{-1}, never mixed in.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .limit_kernels import DIAGONAL_SWITCH, KernelSample
from .oprl import ZeroDiagonalError, eval_polys
from .opuc import szego_eval

__all__ = [
    "Hamiltonian",
    "TransferMatrix",
    "WeylValue",
    "SchrodingerKernelValue",
    "transfer_matrix",
    "kernel_kh",
    "rescaled_kernel_kh",
    "weyl",
    "rescale_h",
    "jacobi_hamiltonian",
    "opuc_hamiltonian",
    "schrodinger_kernel",
    "transfer_form_integral",
    "mobius",
    "J",
]

J = np.array([[0.0, -1.0], [1.0, 0.0]])
_J_INV = np.array([[0.0, 1.0], [-1.0, 0.0]])


class DomainError(ValueError):
    """t beyond the finite Hamiltonian domain without a tail rule."""


@dataclass(frozen=True)
class Hamiltonian:
    """Piecewise-constant 2x2 PSD matrix path; optional constant tail."""

    lengths: np.ndarray
    matrices: np.ndarray  # shape (k, 2, 2)
    tail: np.ndarray | None = None

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float)
        mats = np.asarray(self.matrices, dtype=float)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "matrices", mats)
        if lengths.ndim != 1 or mats.shape != (lengths.size, 2, 2):
            raise ValueError("need k lengths and (k,2,2) matrices")
        if np.any(lengths <= 0):
            raise ValueError("piece lengths must be > 0")
        for m in mats:
            _check_psd(m)
        if self.tail is not None:
            tail = np.asarray(self.tail, dtype=float)
            object.__setattr__(self, "tail", tail)
            _check_psd(tail)

    @property
    def total_length(self):
        return float(self.lengths.sum())

    @classmethod
    def constant(cls, matrix, length=1.0, tail=True):
        m = np.asarray(matrix, dtype=float)
        return cls(np.array([length]), m[None, :, :], tail=m if tail else None)


def _check_psd(m):
    if abs(m[0, 1] - m[1, 0]) > 1e-12 * (1.0 + abs(m[0, 1])):
        raise ValueError("Hamiltonian pieces must be symmetric")
    tr = m[0, 0] + m[1, 1]
    evals = np.linalg.eigvalsh(m)
    if evals[0] < -1e-14 * max(tr, 1.0):
        raise ValueError(f"piece is not PSD (eigenvalues {evals})")


@dataclass(frozen=True)
class TransferMatrix:
    t: float
    z: complex
    entries: np.ndarray  # 2x2 complex


@dataclass(frozen=True)
class WeylValue:
    z: complex
    q: complex
    disk_radius: float
    tol: float = 1e-8

    @property
    def converged(self):
        return self.disk_radius < self.tol


def _sinc(theta):
    if abs(theta) < 1e-6:
        t2 = theta * theta
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    return cmath.sin(theta) / theta


def _piece_factor(m, ell, z, derivative=False):
    """Exact transfer factor of a constant piece, optionally with d/dz."""
    d = float(np.linalg.det(m))
    d = max(d, 0.0)  # clip roundoff; PSD was validated
    s = math.sqrt(d)
    c = m @ _J_INV
    theta = ell * z * s
    eye = np.eye(2)
    w = cmath.cos(theta) * eye + (ell * z * _sinc(theta)) * c
    if not derivative:
        return w, None
    dw = (-ell * s * cmath.sin(theta)) * eye + (ell * cmath.cos(theta)) * c
    return w, dw


def _iter_pieces(h, t):
    """(length, matrix) pieces covering [0, t], tail-extended if needed."""
    remaining = float(t)
    for ell, m in zip(h.lengths, h.matrices):
        if remaining <= 1e-15:
            return
        take = min(ell, remaining)
        yield take, m
        remaining -= take
    if remaining > 1e-12:
        if h.tail is None:
            raise DomainError(
                f"t = {t} beyond domain [0, {h.total_length}] and no tail rule"
            )
        yield remaining, h.tail


def transfer_matrix(h, t, z, derivative=False):
    """W(t, z); multiplicative over pieces, identity at z = 0."""
    if t < 0:
        raise ValueError("t must be >= 0")
    z = complex(z)
    w = np.eye(2, dtype=complex)
    dw = np.zeros((2, 2), dtype=complex) if derivative else None
    for ell, m in _iter_pieces(h, t):
        f, df = _piece_factor(m, ell, z, derivative)
        if derivative:
            dw = dw @ f + w @ df
        w = w @ f
    tm = TransferMatrix(t=float(t), z=z, entries=w)
    return (tm, dw) if derivative else tm


def kernel_kh(h, t, z, w):
    """K_H(t,z,w) = (w22(t,z) conj(w21(t,w)) - w21(t,z) conj(w22(t,w))) / (z - conj w)."""
    z, w = complex(z), complex(w)
    v = w.conjugate()
    if abs(z - v) < DIAGONAL_SWITCH:
        zeta = (z + v) / 2.0
        tm, dm = transfer_matrix(h, t, zeta, derivative=True)
        e = tm.entries
        return complex(e[1, 0] * dm[1, 1] - e[1, 1] * dm[1, 0])
    ez = transfer_matrix(h, t, z).entries
    ew = transfer_matrix(h, t, w).entries
    return complex((ez[1, 1] * np.conj(ew[1, 0]) - ez[1, 0] * np.conj(ew[1, 1])) / (z - v))


def rescaled_kernel_kh(h, t, xi, scaling, grid):
    """Samples of K_H(t, xi + z/tau, xi + w/tau) / K_H(t, xi, xi),
    tau = scaling(K_H(t, xi, xi))."""
    kd = kernel_kh(h, t, xi, xi).real
    if not kd > 0:
        raise ZeroDiagonalError(f"K_H({t}, {xi}, {xi}) = {kd}")
    tau = float(scaling(kd))
    out = []
    for z, w in grid:
        z, w = complex(z), complex(w)
        val = kernel_kh(h, t, xi + z / tau, xi + w / tau)
        out.append(KernelSample(z=z, w=w, value=val / kd))
    return out


def mobius(matrix, tau):
    """(m11 tau + m12) / (m21 tau + m22) on the Riemann sphere."""
    m = np.asarray(matrix)
    if tau == cmath.inf:
        num, den = m[0, 0], m[1, 0]
    else:
        num = m[0, 0] * tau + m[0, 1]
        den = m[1, 0] * tau + m[1, 1]
    if den == 0:
        return cmath.inf
    return complex(num / den)


def weyl(h, z, t_max, tol=1e-8):
    """Weyl coefficient approximant W(t_max, z) * i with a disk-radius estimate.

    disk_radius = 1/(2 Im z K_H(t_max,z,z)) is the standard Weyl-disk bound;
    non-convergence (radius >= tol) is reported in the value, not raised.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("weyl needs Im z > 0")
    tm = transfer_matrix(h, t_max, z)
    q = mobius(tm.entries, 1j)
    kd = kernel_kh(h, t_max, z, z).real
    radius = math.inf if kd <= 0 else 1.0 / (2.0 * z.imag * kd)
    return WeylValue(z=z, q=q, disk_radius=radius, tol=tol)


def rescale_h(h, g, r):
    """Weighted rescaling: lengths/r, diagonal reweighted by g(r)/r and r/g(r)."""
    if r <= 0:
        raise ValueError("r must be > 0")
    gr = float(g(r))
    c1, c2 = gr / r, r / gr

    def reweight(m):
        return np.array([[c1 * m[0, 0], m[0, 1]], [m[1, 0], c2 * m[1, 1]]])

    mats = np.array([reweight(m) for m in h.matrices])
    tail = None if h.tail is None else reweight(h.tail)
    return Hamiltonian(h.lengths / r, mats, tail=tail)


def jacobi_hamiltonian(rec, n_max):
    """Unit-length rank-one pieces [[q_n(0)^2, -p_n q_n],[-p_n q_n, p_n(0)^2]]."""
    if n_max > len(rec):
        raise ValueError(f"n_max = {n_max} exceeds declared length {len(rec)}")
    pv = eval_polys(rec, n_max - 1, 0.0, second_kind=True)
    p = pv.values.real * math.exp(pv.log_scale)
    q = pv.q_values.real * math.exp(pv.log_scale)
    mats = np.empty((n_max, 2, 2))
    for n in range(n_max):
        mats[n] = [[q[n] ** 2, -p[n] * q[n]], [-p[n] * q[n], p[n] ** 2]]
    return Hamiltonian(np.ones(n_max), mats)


def opuc_hamiltonian(v, n_max):
    """Unit-length constant pieces

        (1/2) [[|psi_n(1)|^2,  Im(psi_n(1) conj(phi_n(1)))],
               [Im(psi_n(1) conj(phi_n(1))), |phi_n(1)|^2]];

    the 1/2 normalizes the pieces so kernel_kh reproduces the circle-chain
    kernels K(n+s,.,.) exactly (free case: H = I/2, K(t,0,0) = t/2).
    """
    if n_max > len(v):
        raise ValueError(f"n_max = {n_max} exceeds declared length {len(v)}")
    sz = szego_eval(v, n_max - 1, 1.0)
    mats = np.empty((n_max, 2, 2))
    for n in range(n_max):
        phi, psi = sz.phi[n], sz.psi[n]
        off = float(np.imag(psi * np.conj(phi)))
        mats[n] = 0.5 * np.array([[abs(psi) ** 2, off], [off, abs(phi) ** 2]])
    return Hamiltonian(np.ones(n_max), mats)


def transfer_form_integral(h, t, z, w, n_quad=24):
    """Quadrature of int_0^t W(s,z) H(s) W(s,w)* ds (per piece Gauss-Legendre).

    Equals (W(t,z) J W(t,w)* - J) / (z - conj w); used as the integral-identity
    oracle for transfer matrices.
    """
    from .measures import _leggauss

    x_gl, w_gl = _leggauss(n_quad)
    out = np.zeros((2, 2), dtype=complex)
    start = 0.0
    for ell, m in _iter_pieces(h, t):
        s_nodes = start + (x_gl + 1.0) * (ell / 2.0)
        for s, wq in zip(s_nodes, w_gl):
            wz = transfer_matrix(h, s, z).entries
            ww = transfer_matrix(h, s, w).entries
            out += (wq * ell / 2.0) * (wz @ m @ ww.conj().T)
        start += ell
    return out


# ---------------------------------------------------------------------------
# Schrodinger kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchrodingerKernelValue:
    quadrature: complex
    wronskian: complex
    steps: int


class SchrodingerToleranceError(RuntimeError):
    """Step control failed or the two kernel forms disagree."""


def _schrodinger_sweep(v_fn, beta_bc, x, lams, n_steps, a=0.0):
    """RK4 for u'' = (V - lam) u with u(a) = sin(beta), u'(a) = -cos(beta),
    batched over the spectral parameters lams; also accumulates
    m(x) = int_a^x u(., lam_0) u(., lam_1) dy for consecutive pairs.

    Returns (u, u', m) arrays over lams (m has one entry per adjacent pair).
    """
    lams = np.asarray(lams, dtype=complex)
    u = np.full(lams.shape, math.sin(beta_bc), dtype=complex)
    du = np.full(lams.shape, -math.cos(beta_bc), dtype=complex)
    m = np.zeros(lams.shape[0] // 2, dtype=complex)
    h = (x - a) / n_steps

    def rhs(y, state):
        uu, dd = state
        return dd, (v_fn(y) - lams) * uu

    y = a
    for _ in range(n_steps):
        # quadrature state integrated with Simpson on the RK4 substeps
        prod0 = u[0::2] * u[1::2]
        k1u, k1d = rhs(y, (u, du))
        s2 = (u + 0.5 * h * k1u, du + 0.5 * h * k1d)
        k2u, k2d = rhs(y + 0.5 * h, s2)
        s3 = (u + 0.5 * h * k2u, du + 0.5 * h * k2d)
        k3u, k3d = rhs(y + 0.5 * h, s3)
        s4 = (u + h * k3u, du + h * k3d)
        k4u, k4d = rhs(y + h, s4)
        u_new = u + h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        du_new = du + h * (k1d + 2.0 * k2d + 2.0 * k3d + k4d) / 6.0
        # third-order dense output at the midpoint keeps Simpson at O(h^4)
        u_mid = 0.5 * (u + u_new) + (h / 8.0) * (k1u - k4u)
        prod_mid = u_mid[0::2] * u_mid[1::2]
        prod1 = u_new[0::2] * u_new[1::2]
        m += (h / 6.0) * (prod0 + 4.0 * prod_mid + prod1)
        u, du = u_new, du_new
        y += h
    return u, du, m


def schrodinger_kernel(v_fn, beta_bc, x, z, w, a=0.0, tol=1e-8, max_halvings=14):
    """Reproducing kernel of -u'' + V u = lam u at (z, w):

        int_a^x u(y,z) conj(u(y,w)) dy
      = (u(x,z) conj(u'(x,w)) - u'(x,z) conj(u(x,w))) / (z - conj w),

    both forms returned; Richardson step halving until they stabilize to tol,
    error if the two forms disagree beyond 10x tol.
    """
    if x <= a:
        raise ValueError("x must exceed the left endpoint")
    z, w = complex(z), complex(w)
    vbar = w.conjugate()
    confluent = abs(z - vbar) < DIAGONAL_SWITCH

    n = max(64, int(8 * (x - a) * (1.0 + abs(z) ** 0.5 + abs(w) ** 0.5)))
    prev = None
    for _ in range(max_halvings):
        if confluent:
            quad, wron = _schrodinger_confluent(v_fn, beta_bc, x, (z + vbar) / 2.0, n, a)
        else:
            u, du, m = _schrodinger_sweep(v_fn, beta_bc, x, [z, vbar], n, a)
            quad = complex(m[0])
            wron = complex((u[0] * du[1] - du[0] * u[1]) / (z - vbar))
        if prev is not None and abs(quad - prev[0]) <= tol * (1.0 + abs(quad)) \
                and abs(wron - prev[1]) <= tol * (1.0 + abs(wron)):
            if abs(quad - wron) > 10.0 * tol * (1.0 + abs(quad)):
                raise SchrodingerToleranceError(
                    f"kernel forms disagree: |quad - wronskian| = {abs(quad - wron):.3e}"
                )
            return SchrodingerKernelValue(quadrature=quad, wronskian=wron, steps=n)
        prev = (quad, wron)
        n *= 2
    raise SchrodingerToleranceError(f"step control failed at {n} steps")


def _schrodinger_confluent(v_fn, beta_bc, x, lam, n_steps, a=0.0):
    """Diagonal kernel via the lam-derivative system:
    udot'' = (V - lam) udot - u, so K = u'(x) udot(x) - u(x) udot'(x)."""
    lam = complex(lam)
    u = np.array([math.sin(beta_bc)], dtype=complex)
    du = np.array([-math.cos(beta_bc)], dtype=complex)
    ud = np.zeros(1, dtype=complex)
    dud = np.zeros(1, dtype=complex)
    m = 0.0 + 0.0j
    h = (x - a) / n_steps

    def rhs(y, state):
        uu, dd, vv, ee = state
        pot = v_fn(y) - lam
        return dd, pot * uu, ee, pot * vv - uu

    y = a
    for _ in range(n_steps):
        p0 = u[0] * u[0]
        k1 = rhs(y, (u, du, ud, dud))
        s2 = tuple(s + 0.5 * h * k for s, k in zip((u, du, ud, dud), k1))
        k2 = rhs(y + 0.5 * h, s2)
        s3 = tuple(s + 0.5 * h * k for s, k in zip((u, du, ud, dud), k2))
        k3 = rhs(y + 0.5 * h, s3)
        s4 = tuple(s + h * k for s, k in zip((u, du, ud, dud), k3))
        k4 = rhs(y + h, s4)
        new = [
            s + h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
            for s, a1, a2, a3, a4 in zip((u, du, ud, dud), k1, k2, k3, k4)
        ]
        u_mid = 0.5 * (u + new[0]) + (h / 8.0) * (k1[0] - k4[0])
        p1 = new[0][0] * new[0][0]
        m += (h / 6.0) * (p0 + 4.0 * u_mid[0] * u_mid[0] + p1)
        u, du, ud, dud = new
        y += h
    wron = complex(du[0] * ud[0] - u[0] * dud[0])
    return complex(m), wron
