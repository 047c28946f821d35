import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wlslab import fpsim
from wlslab.errors import UnsupportedFormatError
from wlslab.fpsim import (
    DOUBLE,
    HALF,
    QUADRES,
    SINGLE,
    PrecisionConfig,
    parse_format,
    rdot,
    rmatvec,
    round_to,
    round_to_checked,
    rounded_op,
    rresidual,
    rsum,
    unit_roundoff,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_unit_roundoff_table():
    # three significant digits
    assert unit_roundoff(HALF) == pytest.approx(4.88e-4, rel=1e-3)
    assert unit_roundoff(SINGLE) == pytest.approx(5.96e-8, rel=1e-3)
    assert unit_roundoff(DOUBLE) == pytest.approx(1.11e-16, rel=1e-3)
    assert unit_roundoff(QUADRES) == pytest.approx(9.63e-35, rel=1e-3)


def test_significand_bits():
    assert HALF.significand_bits == 11
    assert SINGLE.significand_bits == 24
    assert DOUBLE.significand_bits == 53


def test_parse_format_aliases():
    assert parse_format("fp16") is HALF
    assert parse_format("Single") is SINGLE
    assert parse_format("quad-residual") is QUADRES
    assert parse_format(DOUBLE) is DOUBLE
    with pytest.raises(UnsupportedFormatError):
        parse_format("fp8")


def test_round_to_examples():
    assert round_to(1.0, HALF) == 1.0
    assert round_to(1.0 + 2.0**-12, HALF) == 1.0  # below half's roundoff, ties to even
    # reference binary16 conversion overflows at 65520
    assert round_to(65520.0, HALF) == math.inf
    v, over = round_to_checked(65520.0, HALF)
    assert over and v == math.inf
    assert round_to_checked(1.5, HALF) == (1.5, False)


def test_round_to_subnormal_and_flush():
    tiny = 2.0**-24  # smallest half subnormal
    assert round_to(tiny, HALF) == tiny
    assert round_to(tiny / 4, HALF) == 0.0
    assert fpsim.round_array(np.array([tiny]), HALF, flush_subnormals=True)[0] == 0.0


def test_rounded_op_examples():
    assert rounded_op("add", (1.0, 2.0**-12), HALF) == 1.0
    x = 0.1
    assert rounded_op("mul", (1.0, x), HALF) == round_to(x, HALF)
    # spacing of half at 2048 is 2, so adding 1 is lost
    assert rounded_op("add", (2048.0, 1.0), HALF) == 2048.0
    assert rounded_op("div", (1.0, 0.0), HALF) == math.inf
    _, flagged = fpsim.rounded_op_checked("div", (1.0, 0.0), SINGLE)
    assert flagged


def test_fma_single_rounding():
    # pick operands where a*b+c in plain double double-rounds differently
    a, b, c = 1.0 + 2.0**-27, 1.0 + 2.0**-27, -1.0
    exact = fpsim._fma_double(a, b, c)
    assert exact == pytest.approx(2.0**-26, rel=1e-12)
    assert rounded_op("fma", (a, b, c), DOUBLE) == exact


@given(finite)
def test_round_idempotent(x):
    for fmt in (HALF, SINGLE):
        assert round_to(round_to(x, fmt), fmt) == round_to(x, fmt) or (
            math.isnan(round_to(x, fmt))
        )


@given(finite, finite)
def test_round_monotone(x, y):
    if x > y:
        x, y = y, x
    for fmt in (HALF, SINGLE):
        rx, ry = round_to(x, fmt), round_to(y, fmt)
        assert rx <= ry


@given(st.integers(min_value=-2000, max_value=2000))
def test_exact_roundtrip_half_integers(k):
    # integers up to 2048 are exactly representable in binary16
    assert round_to(float(k), HALF) == float(k)


def test_single_rounding_error_bound():
    rng = np.random.default_rng(7)
    for fmt in (HALF, SINGLE):
        xs = rng.uniform(-100, 100, size=200)
        ys = rng.uniform(0.5, 2.0, size=200)
        for op in ("add", "sub", "mul", "div"):
            for x, y in zip(fpsim.round_array(xs, fmt), fpsim.round_array(ys, fmt)):
                exact = {"add": x + y, "sub": x - y, "mul": x * y, "div": x / y}[op]
                got = rounded_op(op, (x, y), fmt)
                assert abs(got - exact) <= fmt.unit_roundoff * abs(exact)


def test_rsum_matches_exact_in_double():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(101)
    assert rsum(a, DOUBLE) == pytest.approx(math.fsum(a), rel=1e-14)


def test_rsum_quadres_is_compensated():
    # alternating large/small terms that plain double summation gets wrong
    a = np.tile([1e16, 1.0, -1e16], 334)
    assert rsum(a, QUADRES) == pytest.approx(334.0, abs=1e-9)


def test_rdot_and_rmatvec_half():
    m = np.ones((4, 4))
    v = np.ones(4)
    assert rdot(v, v, HALF) == 4.0
    np.testing.assert_array_equal(rmatvec(m, v, HALF), np.full(4, 4.0))
    # values below half spacing vanish in the accumulation
    big = np.array([2048.0, 1.0])
    assert rdot(big, np.ones(2), HALF) == 2048.0


def test_rresidual_quadres_beats_double():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((20, 5)) * 1e8
    x = rng.standard_normal(5)
    b = a @ x
    r_dd = rresidual(b, a, x, QUADRES)
    r_d = rresidual(b, a, x, DOUBLE)
    assert np.linalg.norm(r_dd) <= np.linalg.norm(r_d) + 1e-6


def test_precision_config_validation():
    PrecisionConfig.from_names("half", "single", "double")
    with pytest.raises(UnsupportedFormatError):
        PrecisionConfig.from_names("double", "single", "half")


def test_precision_config_us_defaults_to_working():
    pc = PrecisionConfig.from_names("single", "single", "double")
    assert pc.u_s is SINGLE
