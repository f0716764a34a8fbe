import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdlab.measures import Measure, RegVarFn, gallery
from cdlab.oprl import (
    RecurrenceCoeffs,
    SupportTooSmallError,
    ZeroDiagonalError,
    cd_kernel,
    eval_polys,
    interp_kernel,
    kernel_diag,
    nevai_ratio,
    poly_zeros,
    rescaled_cd,
    stieltjes_coeffs,
)


@pytest.fixture(scope="module")
def cheb():
    return stieltjes_coeffs(gallery("chebyshev"), 62)


@pytest.fixture(scope="module")
def leg():
    return stieltjes_coeffs(gallery("legendre"), 210)


def test_rec_validation():
    with pytest.raises(ValueError):
        RecurrenceCoeffs(a=np.array([1.0, -0.5]), b=np.zeros(2))
    with pytest.raises(ValueError):
        RecurrenceCoeffs(a=np.ones(3), b=np.zeros(2))


def test_chebyshev_coefficients(cheb):
    # classical closed form, cross-checked by the doubled-node oracle
    assert abs(cheb.a[0] - 1.0 / math.sqrt(2.0)) <= 1e-10
    assert np.max(np.abs(cheb.a[1:] - 0.5)) <= 1e-10
    assert np.max(np.abs(cheb.b)) <= 1e-10
    doubled = stieltjes_coeffs(gallery("chebyshev"), 62, node_factor=40)
    assert np.max(np.abs(doubled.a - cheb.a)) <= 1e-11


def test_legendre_coefficients(leg):
    n = np.arange(1, len(leg) + 1)
    assert np.max(np.abs(leg.a - n / np.sqrt(4.0 * n * n - 1.0))) <= 1e-9
    assert np.max(np.abs(leg.b)) <= 1e-10


def test_single_atom_support_too_small():
    mu = Measure(np.array([0.5]), np.array([1.0]))
    with pytest.raises(SupportTooSmallError):
        stieltjes_coeffs(mu, 1)


def test_eval_polys_basics(cheb):
    pv = eval_polys(cheb, 0, 0.37 + 0.1j)
    assert pv.values[0] == 1.0
    # T_{2m}(0) pattern: p_{2m}(0) = sqrt(2) (-1)^m, odd ones vanish
    pv = eval_polys(cheb, 21, 0.0)
    for m in range(1, 11):
        assert abs(pv.values[2 * m] - math.sqrt(2.0) * (-1) ** m) <= 1e-9
        assert pv.values[2 * m - 1] == 0.0


def test_legendre_p1_normalization(leg):
    # p_1(z) = sqrt(3) z; oracle: quadrature normalization of the weight 1/2
    z = 0.83
    pv = eval_polys(leg, 1, z)
    assert abs(pv.values[1] - math.sqrt(3.0) * z) <= 1e-9


def test_eval_polys_second_kind(cheb):
    pv = eval_polys(cheb, 3, 0.0, second_kind=True)
    assert pv.q_values[0] == 0.0
    assert abs(pv.q_values[1] - 1.0 / cheb.a[0]) <= 1e-12


def test_eval_polys_overflow_guard():
    rec = RecurrenceCoeffs(a=np.full(2500, 0.5), b=np.zeros(2500))
    pv = eval_polys(rec, 2500, 4.0)
    assert pv.log_scale > 0.0
    assert np.all(np.isfinite(pv.values[np.isfinite(pv.values)].real))


def test_cd_kernel_trivial_and_chebyshev(cheb):
    assert abs(cd_kernel(cheb, 1, 0.3 + 1j, -2.0) - 1.0) <= 1e-14
    assert abs(cd_kernel(cheb, 5, 0.0, 0.0) - 5.0) <= 1e-10


def test_cd_methods_agree(cheb):
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(1, 61))
        z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        w = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        a = cd_kernel(cheb, n, z, w, method="sum")
        b = cd_kernel(cheb, n, z, w, method="cd_formula")
        assert abs(a - b) <= 1e-10 * max(abs(a), 1e-300)


def test_cd_kernel_gram_positivity(leg):
    rng = np.random.default_rng(8)
    pts = [complex(a, b) for a, b in rng.uniform(-2, 2, (6, 2))]
    gram = np.array([[cd_kernel(leg, 30, zi, zj) for zj in pts] for zi in pts])
    evals = np.linalg.eigvalsh((gram + gram.conj().T) / 2.0)
    assert evals[0] >= -1e-8 * np.trace(gram).real


def test_interp_kernel(cheb):
    z, w = 0.3 + 0.2j, -0.1
    assert interp_kernel(cheb, 7.0, z, w) == cd_kernel(cheb, 7, z, w)
    assert abs(interp_kernel(cheb, 0.5, z, w) - 0.5) <= 1e-14
    assert abs(interp_kernel(cheb, 4.25, 0.0, 0.0) - 3.5) <= 1e-10
    assert interp_kernel(cheb, 0.0, z, w) == 0.0


def test_kernel_diag_matches_interp(cheb):
    for t in (5, 7.25, 12.9):
        assert abs(kernel_diag(cheb, t, 0.2)
                   - interp_kernel(cheb, t, 0.2, 0.2).real) <= 1e-10


def test_rescaled_cd_normalization(leg):
    h = RegVarFn(scale=0.5, index=1.0)
    samples = rescaled_cd(leg, 0.0, h, 200, [(0.0, 0.0)])
    assert abs(samples[0].value - 1.0) <= 1e-12


def test_rescaled_cd_bulk_point(leg):
    # Theorem-style check: the (1,0) sample approaches sine_kernel(1,0) = 0
    h = RegVarFn(scale=0.5, index=1.0)
    samples = rescaled_cd(leg, 0.0, h, 200, [(1.0, 0.0)])
    assert abs(samples[0].value) <= 0.05


def test_rescaled_cd_hermitian(leg):
    h = RegVarFn(scale=0.5, index=1.0)
    grid = [(0.4 + 0.2j, -0.3 + 0.1j), (-0.3 + 0.1j, 0.4 + 0.2j)]
    s = rescaled_cd(leg, 0.0, h, 100, grid)
    assert abs(s[0].value - s[1].value.conjugate()) <= 1e-12


def test_rescaled_cd_zero_diagonal():
    # K(0,.,.) = 0, so rescaling at index 0 has nothing to normalize by
    rec = RecurrenceCoeffs(a=np.ones(5), b=np.zeros(5))
    with pytest.raises(ZeroDiagonalError):
        rescaled_cd(rec, 0.0, RegVarFn(), 0, [(0.0, 0.0)])


def test_nevai_ratio(cheb):
    assert nevai_ratio(cheb, 0.0, 60) >= 1.0
    assert nevai_ratio(cheb, 0.0, 60) - 1.0 <= 0.05
    # dominant-atom measure: ratio stays bounded away from huge values,
    # and matches the direct-sum oracle
    mu = Measure(np.array([-0.7, 0.0, 0.4, 0.9]), np.array([0.1, 2.0, 0.1, 0.1]))
    rec = stieltjes_coeffs(mu, 3)
    r = nevai_ratio(rec, 0.0, 2)
    pv = eval_polys(rec, 2, 0.0)
    direct = float(np.sum(np.abs(pv.values) ** 2) / np.sum(np.abs(pv.values[:2]) ** 2))
    assert abs(r - direct) <= 1e-12


def test_poly_zeros_basics(cheb):
    assert np.allclose(poly_zeros(cheb, 1), [0.0], atol=1e-12)
    z3 = poly_zeros(cheb, 3)
    assert np.allclose(z3, [-math.sqrt(3) / 2, 0.0, math.sqrt(3) / 2], atol=1e-10)


def test_poly_zeros_against_eigvalsh(leg):
    n = 40
    d = leg.b[:n]
    e = leg.a[: n - 1]
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.max(np.abs(poly_zeros(leg, n) - np.linalg.eigvalsh(t))) <= 1e-12


@settings(max_examples=10, deadline=None)
@given(n=st.integers(2, 40))
def test_zeros_interlace(n):
    rec = stieltjes_coeffs(gallery("legendre"), 45)
    lo = poly_zeros(rec, n)
    hi = poly_zeros(rec, n + 1)
    assert np.all(hi[:-1] < lo)
    assert np.all(lo < hi[1:])


def test_diag_strictly_increasing(cheb):
    vals = [cd_kernel(cheb, n, 0.3, 0.3).real for n in range(1, 40)]
    assert all(b > a - 1e-12 * abs(b) for a, b in zip(vals, vals[1:]))


def test_interp_affine_in_t(cheb):
    z, w = 0.7 + 0.3j, 0.2 - 0.1j
    k0 = interp_kernel(cheb, 10.25, z, w)
    k1 = interp_kernel(cheb, 10.5, z, w)
    k2 = interp_kernel(cheb, 10.75, z, w)
    assert abs(k1 - (k0 + k2) / 2.0) <= 1e-12 * max(abs(k1), 1.0)


def test_stieltjes_positivity_loss():
    # atoms distinct as floats but numerically coincident starve the Krylov
    # space: a_2 collapses and the failing index is reported
    from cdlab.oprl import PositivityLossError

    mu = Measure(np.array([0.0, 1e-308, 1.0]), np.array([1.0, 1.0, 1.0]))
    with pytest.raises(PositivityLossError) as exc:
        stieltjes_coeffs(mu, 2)
    assert exc.value.index >= 1
