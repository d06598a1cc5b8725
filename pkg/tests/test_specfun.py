"""Special-function tests against independent series oracles.

The oracles below build J0/J1/Y0/Y1 from their ascending power series with
plain Python floats (30+ terms), with no code shared with the package, and
roots/half-max locations come from bisection on those oracles.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patrec.specfun import bessel_j, bessel_y, hankel1

EULER_GAMMA = 0.5772156649015328606


# ----------------------------------------------------------------------------
# oracles


def oracle_j0(x: float, terms: int = 30) -> float:
    z = 0.25 * x * x
    term, total = 1.0, 1.0
    for k in range(1, terms + 1):
        term *= -z / (k * k)
        total += term
    return total


def oracle_j1(x: float, terms: int = 30) -> float:
    z = 0.25 * x * x
    term, total = 1.0, 1.0
    for k in range(1, terms + 1):
        term *= -z / (k * (k + 1))
        total += term
    return 0.5 * x * total


def oracle_y0(x: float, terms: int = 30) -> float:
    z = 0.25 * x * x
    term, total, h = 1.0, 0.0, 0.0
    for k in range(1, terms + 1):
        term *= -z / (k * k)
        h += 1.0 / k
        total += -term * h  # (-1)^{k+1} H_k z^k/(k!)^2
    return (2.0 / math.pi) * ((math.log(0.5 * x) + EULER_GAMMA) * oracle_j0(x, terms) + total)


def oracle_y1(x: float, terms: int = 30) -> float:
    z = 0.25 * x * x
    term, h0, h1 = 1.0, 0.0, 1.0
    total = term * (h0 + h1)
    for k in range(1, terms + 1):
        term *= -z / (k * (k + 1))
        h0 += 1.0 / k
        h1 += 1.0 / (k + 1)
        total += term * (h0 + h1)
    return (
        (2.0 / math.pi) * (math.log(0.5 * x) + EULER_GAMMA) * oracle_j1(x, terms)
        - 2.0 / (math.pi * x)
        - (x / (2.0 * math.pi)) * total
    )


def bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    assert flo * f(hi) < 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if flo * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return 0.5 * (lo + hi)


J0_FIRST_ROOT = bisect(oracle_j0, 2.0, 3.0)
Y0_FIRST_ROOT = bisect(oracle_y0, 0.5, 1.5)
Y1_FIRST_ROOT = bisect(oracle_y1, 1.5, 3.0)
J0_HALF_MAX = bisect(lambda x: oracle_j0(x) - 0.5, 1.0, 2.0)


# ----------------------------------------------------------------------------
# value checks


def test_j0_at_zero_is_one():
    assert bessel_j(0, 0.0) == 1.0


def test_j1_at_zero_is_zero():
    assert bessel_j(1, 0.0) == 0.0


def test_j0_half_maximum_near_1p5():
    # the half-maximum abscissa quoted as ~1.5 sits at 1.5206...
    assert abs(bessel_j(0, 1.5) - oracle_j0(1.5)) < 1e-9
    assert oracle_j0(1.5) == pytest.approx(0.5118, abs=5e-4)
    assert J0_HALF_MAX == pytest.approx(1.5, rel=0.02)


def test_j0_first_root():
    assert abs(bessel_j(0, 2.404826)) < 1e-6
    assert abs(bessel_j(0, J0_FIRST_ROOT)) < 1e-9


def test_y0_first_root():
    assert abs(bessel_y(0, 0.893577)) < 1e-5
    assert abs(bessel_y(0, Y0_FIRST_ROOT)) < 1e-9


def test_y1_first_root():
    assert abs(bessel_y(1, 2.197141)) < 1e-5
    assert abs(bessel_y(1, Y1_FIRST_ROOT)) < 1e-9


@pytest.mark.parametrize("order,oracle", [(0, oracle_j0), (1, oracle_j1)])
def test_j_matches_series_oracle_small_args(order, oracle):
    xs = np.linspace(0.0, 7.99, 400)
    mine = bessel_j(order, xs)
    ref = np.array([oracle(float(x)) for x in xs])
    assert np.abs(mine - ref).max() < 1e-10


@pytest.mark.parametrize("order,oracle", [(0, oracle_y0), (1, oracle_y1)])
def test_y_matches_series_oracle_small_args(order, oracle):
    xs = np.linspace(0.05, 7.99, 400)
    mine = bessel_y(order, xs)
    ref = np.array([oracle(float(x)) for x in xs])
    assert np.abs(mine - ref).max() < 1e-10


def test_series_asymptotic_seam_is_smooth():
    # crossing x = 8 must not jump: compare one-sided finite differences
    for fn in (lambda x: bessel_j(0, x), lambda x: bessel_j(1, x),
               lambda x: bessel_y(0, x), lambda x: bessel_y(1, x)):
        below = fn(8.0 - 1e-9)
        above = fn(8.0 + 1e-9)
        assert abs(above - below) < 1e-7


# ----------------------------------------------------------------------------
# identities and properties


def test_wronskian_identity():
    # J0 Y1 - J1 Y0 = -2/(pi x), sampled densely over [0.1, 100]
    xs = np.linspace(0.1, 100.0, 1500)
    lhs = bessel_j(0, xs) * bessel_y(1, xs) - bessel_j(1, xs) * bessel_y(0, xs)
    assert np.abs(lhs + 2.0 / (np.pi * xs)).max() < 1e-6


def test_j0_derivative_is_minus_j1():
    xs = np.linspace(0.1, 60.0, 500)
    h = 1e-5
    fd = (bessel_j(0, xs + h) - bessel_j(0, xs - h)) / (2 * h)
    assert np.abs(fd + bessel_j(1, xs)).max() < 1e-5


def test_j_bounded_by_one():
    xs = np.concatenate([np.linspace(0, 50, 2000), np.linspace(50, 1e4, 2000)])
    assert np.abs(bessel_j(0, xs)).max() <= 1.0 + 1e-12
    assert np.abs(bessel_j(1, xs)).max() <= 1.0 + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.1, max_value=9000.0))
def test_wronskian_property(x):
    lhs = bessel_j(0, x) * bessel_y(1, x) - bessel_j(1, x) * bessel_y(0, x)
    assert lhs + 2.0 / (math.pi * x) == pytest.approx(0.0, abs=1e-6)


def test_hankel_asymptotic_magnitude():
    for x in (10.0, 20.0, 100.0, 1e4):
        expected = math.sqrt(2.0 / (math.pi * x))
        assert abs(hankel1(0, x)) == pytest.approx(expected, rel=0.02)
        assert abs(hankel1(1, x)) == pytest.approx(expected, rel=0.02)


def test_hankel_phase_matches_asymptotic_form():
    x = 50.0
    expected = math.sqrt(2.0 / (math.pi * x)) * np.exp(1j * (x - np.pi / 4))
    assert hankel1(0, x) == pytest.approx(expected, rel=0.01)
    expected1 = math.sqrt(2.0 / (math.pi * x)) * np.exp(1j * (x - np.pi / 2 - np.pi / 4))
    assert hankel1(1, x) == pytest.approx(expected1, rel=0.01)


def test_hankel_components_match_j_and_y():
    h = hankel1(0, 1.0)
    assert h.real == pytest.approx(bessel_j(0, 1.0), abs=1e-12)
    assert h.imag == pytest.approx(bessel_y(0, 1.0), abs=1e-12)


# ----------------------------------------------------------------------------
# domain errors


def test_rejects_bad_order():
    with pytest.raises(ValueError):
        bessel_j(2, 1.0)
    with pytest.raises(ValueError):
        bessel_y(-1, 1.0)


def test_rejects_nonfinite():
    with pytest.raises(ValueError):
        bessel_j(0, float("nan"))
    with pytest.raises(ValueError):
        bessel_j(0, float("inf"))


def test_y_and_hankel_reject_nonpositive():
    with pytest.raises(ValueError):
        bessel_y(0, 0.0)
    with pytest.raises(ValueError):
        bessel_y(0, -1.0)
    with pytest.raises(ValueError):
        hankel1(1, 0.0)


def test_j_rejects_negative():
    with pytest.raises(ValueError):
        bessel_j(0, -0.5)
