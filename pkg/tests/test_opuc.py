import cmath
import math

import numpy as np
import pytest

from cdlab.measures import RegVarFn, gallery
from cdlab.opuc import (
    VerblunskyCoeffs,
    cd_kernel_circle,
    kernel_diag_circle,
    opuc_canonical_kernel,
    opuc_interp_kernel,
    rescaled_cd_circle,
    szego_eval,
    verblunsky_from_measure,
)


@pytest.fixture(scope="module")
def alphas():
    rng = np.random.default_rng(17)
    return VerblunskyCoeffs(rng.uniform(-0.5, 0.5, 41) + 1j * rng.uniform(-0.5, 0.5, 41))


def test_modulus_bound():
    with pytest.raises(ValueError):
        VerblunskyCoeffs(np.array([0.3, 1.0]))


def test_free_coefficients_powers():
    v = VerblunskyCoeffs.free(6)
    z = 0.3 + 0.4j
    sz = szego_eval(v, 6, z)
    for n in range(7):
        assert abs(sz.phi[n] - z ** n) <= 1e-14
        assert abs(sz.phi_star[n] - 1.0) <= 1e-14
        assert abs(sz.psi[n] - z ** n) <= 1e-14


def test_reflection_identity(alphas):
    z = 0.4 + 0.3j
    sz = szego_eval(alphas, 7, z)
    sref = szego_eval(alphas, 7, 1.0 / np.conj(z))
    lhs = sz.phi_star[7]
    rhs = z ** 7 * np.conj(sref.phi[7])
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_modulus_identity_on_circle(alphas):
    zeta = cmath.exp(0.77j)
    sz = szego_eval(alphas, 20, zeta)
    for n in range(21):
        assert abs(abs(sz.phi_star[n]) - abs(sz.phi[n])) <= 1e-12 * abs(sz.phi[n])


def test_cd_circle_free():
    v = VerblunskyCoeffs.free(12)
    assert abs(cd_kernel_circle(v, 7, 1.0, 1.0) - 7.0) <= 1e-12
    zeta, omega = cmath.exp(0.1j), cmath.exp(-0.2j)
    q = zeta * np.conj(omega)
    geo = (1.0 - q ** 9) / (1.0 - q)
    assert abs(cd_kernel_circle(v, 9, zeta, omega) - geo) <= 1e-12


def test_cd_circle_methods_agree(alphas):
    rng = np.random.default_rng(4)
    for _ in range(10):
        n = int(rng.integers(1, 41))
        zeta = cmath.exp(1j * rng.uniform(-3, 3)) * rng.uniform(0.7, 1.3)
        omega = cmath.exp(1j * rng.uniform(-3, 3)) * rng.uniform(0.7, 1.3)
        a = cd_kernel_circle(alphas, n, zeta, omega, method="sum")
        b = cd_kernel_circle(alphas, n, zeta, omega, method="cd_formula")
        assert abs(a - b) <= 1e-10 * max(abs(a), 1e-300)


def test_cd_circle_confluent_branch(alphas):
    zeta = cmath.exp(0.31j)
    direct = cd_kernel_circle(alphas, 15, zeta, zeta, method="sum").real
    formula = cd_kernel_circle(alphas, 15, zeta, zeta, method="cd_formula").real
    assert abs(direct - formula) <= 1e-10 * direct


def test_diag_monotone(alphas):
    vals = [kernel_diag_circle(alphas, n, 0.3) for n in range(1, 30)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_rescaled_cd_circle_normalization(alphas):
    h = RegVarFn(scale=1.0 / (2 * math.pi), index=1.0)
    s = rescaled_cd_circle(alphas, 0.2, h, 30, [(0.0, 0.0)])
    assert abs(s[0].value - 1.0) <= 1e-12


def test_rescaled_cd_circle_dirichlet():
    v = VerblunskyCoeffs.free(10000)
    h = RegVarFn(scale=1.0 / (2 * math.pi), index=1.0)
    s = rescaled_cd_circle(v, 0.0, h, 10000, [(0.5, 0.0)])
    target = math.sin(math.pi * 0.5) / (math.pi * 0.5)
    assert abs(s[0].value - target) <= 1e-3


def test_rescaled_cd_circle_hermitian(alphas):
    h = RegVarFn(scale=1.0 / (2 * math.pi), index=1.0)
    grid = [(0.4 + 0.2j, -0.1 + 0.3j), (-0.1 + 0.3j, 0.4 + 0.2j)]
    s = rescaled_cd_circle(alphas, 0.0, h, 25, grid)
    assert abs(s[0].value - s[1].value.conjugate()) <= 1e-12


def test_canonical_kernel_s_consistency(alphas):
    rng = np.random.default_rng(9)
    for _ in range(8):
        n = int(rng.integers(0, 20))
        z = complex(rng.uniform(-2, 2), rng.uniform(-0.5, 0.5))
        w = complex(rng.uniform(-2, 2), rng.uniform(-0.5, 0.5))
        a = opuc_canonical_kernel(alphas, n + 1.0, z, w)
        b = opuc_canonical_kernel(alphas, float(n + 1), z, w)
        assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


def test_canonical_kernel_interpolation(alphas):
    # sin-ratio interpolation identity at s = 0.37 and other interior values
    rng = np.random.default_rng(10)
    for s in (0.1, 0.37, 0.5, 0.73, 0.9):
        for _ in range(4):
            n = int(rng.integers(1, 20))
            z = complex(rng.uniform(-2, 2), rng.uniform(-0.5, 0.5))
            w = complex(rng.uniform(-2, 2), rng.uniform(-0.5, 0.5))
            a = opuc_canonical_kernel(alphas, n + s, z, w)
            b = opuc_interp_kernel(alphas, n + s, z, w)
            assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


def test_canonical_kernel_diag_positive():
    v = VerblunskyCoeffs.free(30)
    for t in (3.0, 7.5, 12.37):
        val = opuc_canonical_kernel(v, t, 0.4, 0.4)
        assert abs(val.imag) <= 1e-12 * abs(val)
        assert val.real > 0
        # free case closed form sin((n+s)u/2)/u -> (n+s)/2 on the diagonal
        assert abs(val.real - t / 2.0) <= 1e-10 * t


def test_verblunsky_from_lebesgue():
    v = verblunsky_from_measure(gallery("circle_lebesgue"), 12)
    assert np.max(np.abs(v.alpha)) <= 1e-10


def test_verblunsky_from_jump_matches_kernels():
    # coefficients from the discretized measure reproduce the CD kernel
    # computed by direct node sums (independent route)
    mu = gallery("circle_jump", sigma_minus=0.5, sigma_plus=1.0)
    n = 10
    v = verblunsky_from_measure(mu, n)
    from cdlab.oprl import _discretize

    theta, wts = _discretize(mu, 60, node_factor=30)
    wts = wts / wts.sum()
    nodes = np.exp(1j * theta)
    # Gram-Schmidt the monomials on the nodes as the oracle
    basis = []
    for k in range(n):
        vec = nodes ** k
        for q in basis:
            vec = vec - np.sum(wts * vec * np.conj(q)) * q
        basis.append(vec / np.sqrt(np.sum(wts * np.abs(vec) ** 2)))
    zeta, omega = cmath.exp(0.4j), cmath.exp(-0.9j)
    iz = int(np.argmin(np.abs(nodes - zeta)))  # evaluate at a node
    io = int(np.argmin(np.abs(nodes - omega)))
    oracle = sum(q[iz] * np.conj(q[io]) for q in basis)
    mine = cd_kernel_circle(v, n, nodes[iz], nodes[io], method="sum")
    assert abs(mine - oracle) <= 1e-8 * max(abs(oracle), 1.0)


def test_circle_gram_positivity(alphas):
    rng = np.random.default_rng(23)
    pts = [cmath.exp(1j * t) * r for t, r in
           zip(rng.uniform(-3, 3, 6), rng.uniform(0.9, 1.1, 6))]
    gram = np.array([[cd_kernel_circle(alphas, 12, zi, zj) for zj in pts]
                     for zi in pts])
    evals = np.linalg.eigvalsh((gram + gram.conj().T) / 2.0)
    assert evals[0] >= -1e-8 * np.trace(gram).real


def test_rescaled_free_rate_bound():
    # closed-form Dirichlet rate: sup error <= 10/n on |Re| <= 2 real grids
    h = RegVarFn(scale=1.0 / (2 * math.pi), index=1.0)
    ax = np.linspace(-2.0, 2.0, 9)
    grid = [(complex(x), complex(y)) for x in ax for y in ax]
    for n in (1000, 10000):
        v = VerblunskyCoeffs.free(n)
        samples = rescaled_cd_circle(v, 0.0, h, n, grid)
        sup = max(abs(s.value - math.sin(math.pi * (s.z - s.w).real)
                      / (math.pi * (s.z - s.w).real))
                  if s.z != s.w else abs(s.value - 1.0) for s in samples)
        assert sup <= 10.0 / n
