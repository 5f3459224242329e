import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mpid.errors import DomainError
from mpid.precision import (
    BINARY16, BINARY32, BINARY64, DOUBLE, SIMULATED_HALF, SINGLE,
    FloatFormat, PrecisionContext, ctx_op, ctx_store, dot_step, gamma,
    round_matrix, round_scalar, round_to,
)

FORMATS = [BINARY16, BINARY32, BINARY64]
finite = st.floats(allow_nan=False, allow_infinity=False)


def same_bits(a, b):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    return (a.view(np.uint64) == b.view(np.uint64)) | (np.isnan(a) & np.isnan(b))


# format constants

@pytest.mark.parametrize("fmt, bits, u", [
    (BINARY16, (5, 10), 2.0 ** -11),
    (BINARY32, (8, 23), 2.0 ** -24),
    (BINARY64, (11, 52), 2.0 ** -53),
])
def test_format_fields(fmt, bits, u):
    assert (fmt.exponent_bits, fmt.mantissa_bits) == bits
    assert fmt.unit_roundoff == u
    assert fmt.precision == bits[1] + 1


def test_binary16_limits():
    assert BINARY16.max_finite == 65504.0
    assert BINARY16.min_normal == 2.0 ** -14
    assert BINARY16.min_subnormal == 2.0 ** -24
    assert (BINARY16.e_min, BINARY16.e_max) == (-14, 15)


def test_limits_match_numpy_finfo():
    for fmt, dt in [(BINARY32, np.float32), (BINARY64, np.float64)]:
        info = np.finfo(dt)
        assert fmt.max_finite == float(info.max)
        assert fmt.min_normal == float(info.tiny)


# round_scalar examples

def test_round_exact_one():
    assert round_scalar(1.0, BINARY16) == 1.0


def test_round_tenth_binary16():
    assert round_scalar(0.1, BINARY16) == 0.0999755859375
    assert round_scalar(0.1, BINARY16) == oracles.round_reference(0.1, 5, 10)[0]


@pytest.mark.parametrize("x, expected", [
    (70000.0, math.inf), (-70000.0, -math.inf), (65520.0, math.inf),
    (65519.99, 65504.0), (2.0 ** -25, 0.0), (3 * 2.0 ** -26, 2.0 ** -24),
])
def test_round_boundaries_binary16(x, expected):
    assert round_scalar(x, BINARY16) == expected


def test_round_specials():
    assert math.isnan(round_scalar(math.nan, BINARY16))
    assert round_scalar(math.inf, BINARY32) == math.inf
    assert math.copysign(1.0, round_scalar(-1e-30, BINARY16)) == -1.0


def test_ties_to_even():
    # 1 + 2**-11 sits halfway between 1 and 1 + 2**-10
    assert round_scalar(1 + 2.0 ** -11, BINARY16) == 1.0
    assert round_scalar(1 + 3 * 2.0 ** -11, BINARY16) == 1 + 2 * 2.0 ** -10


def test_round_scalar_array_matches_oracle_dense():
    x = oracles.binary16_sample(n=200_000, seed=7)
    assert same_bits(round_scalar(x, BINARY16), oracles.round_reference(x, 5, 10)).all()


def test_binary32_matches_oracle():
    rng = np.random.default_rng(3)
    x = np.ldexp(rng.random(200_000) + 1.0, rng.integers(-160, 130, 200_000))
    assert same_bits(round_to(x, BINARY32), oracles.round_reference(x, 8, 23)).all()


def test_binary64_is_identity():
    x = np.array([0.1, -3e-310, 1e308, math.pi])
    assert same_bits(round_to(x, BINARY64), x).all()


# properties

@settings(max_examples=300, deadline=None)
@given(finite, st.sampled_from(FORMATS))
def test_idempotent(x, fmt):
    r = round_scalar(x, fmt)
    assert same_bits(round_scalar(r, fmt), r)


@settings(max_examples=300, deadline=None)
@given(finite, finite, st.sampled_from(FORMATS))
def test_monotone(x, y, fmt):
    x, y = min(x, y), max(x, y)
    assert round_scalar(x, fmt) <= round_scalar(y, fmt)


@settings(max_examples=300, deadline=None)
@given(finite, st.sampled_from(FORMATS))
def test_sign_symmetric(x, fmt):
    assert same_bits(round_scalar(-x, fmt), -round_scalar(x, fmt))


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=2.0 ** -14, max_value=65504.0), st.sampled_from(FORMATS))
def test_relative_error_bound(x, fmt):
    r = round_scalar(x, fmt)
    assert abs(r - x) <= abs(x) * fmt.unit_roundoff


@settings(max_examples=300, deadline=None)
@given(finite, finite, st.sampled_from(["add", "sub", "mul", "div"]))
def test_double_context_is_native(x, y, op):
    native = {"add": x + y, "sub": x - y, "mul": x * y,
              "div": (x / y) if y != 0 else None}[op]
    if native is None:
        return
    assert same_bits(ctx_op(op, x, y, DOUBLE), native)


# round_matrix

def test_round_matrix_identity():
    I3 = np.eye(3)
    assert np.array_equal(round_matrix(I3, BINARY16), I3)


def test_round_matrix_example():
    A = np.array([[0.1, 1.0], [-0.1, 65504.0]])
    expected = np.array([[0.0999755859375, 1.0], [-0.0999755859375, 65504.0]])
    assert np.array_equal(round_matrix(A, BINARY16), expected)


def test_round_matrix_overflow():
    with pytest.raises(OverflowError):
        round_matrix(np.array([[1e6]]), BINARY16)


# gamma

def test_gamma():
    u = BINARY32.unit_roundoff
    assert gamma(1, u) == u / (1 - u)
    assert gamma(2, 6.0e-8) == pytest.approx(1.2000000072e-7, rel=1e-15)
    with pytest.raises(DomainError):
        gamma(2 ** 11, BINARY16.unit_roundoff)
    with pytest.raises(DomainError):
        gamma(0, u)


# contexts

def test_context_definitions():
    assert DOUBLE.storage is BINARY64 and DOUBLE.accumulation is BINARY64
    assert SINGLE.storage is BINARY32 and SINGLE.accumulation is BINARY32
    assert SIMULATED_HALF.storage is BINARY16 and SIMULATED_HALF.accumulation is BINARY32
    for ctx in (DOUBLE, SINGLE, SIMULATED_HALF):
        assert ctx.accumulation.unit_roundoff <= ctx.storage.unit_roundoff


def test_context_rejects_coarse_accumulation():
    with pytest.raises(ValueError):
        PrecisionContext("bad", BINARY32, BINARY16)


def test_ctx_op_examples():
    assert ctx_op("add", 1.0, 2.0, DOUBLE) == 3.0
    assert ctx_op("add", 1.0, 2.0 ** -24, SINGLE) == 1.0
    assert ctx_op("add", 1.0, 2.0 ** -23, SINGLE) == 1.0 + 2.0 ** -23
    assert ctx_op("sqrt", 2.0, None, SINGLE) == float(np.sqrt(np.float32(2.0)))
    with pytest.raises(ValueError):
        ctx_op("pow", 1.0, 2.0, DOUBLE)


def test_ctx_op_single_matches_float32_arithmetic():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(500).astype(np.float32)
    b = rng.standard_normal(500).astype(np.float32)
    for x, y in zip(a, b):
        assert ctx_op("mul", x, y, SINGLE) == float(x * y)
        assert ctx_op("add", x, y, SINGLE) == float(x + y)


def test_ctx_store_half():
    assert ctx_store(2.0 ** -25, SIMULATED_HALF) == 0.0
    assert ctx_store(2.0 ** -24, SIMULATED_HALF) == 2.0 ** -24
    assert ctx_store(0.1, SIMULATED_HALF) == 0.0999755859375


def test_store_returns_accumulation_dtype():
    out = SIMULATED_HALF.store(np.array([0.1, 0.2]))
    assert out.dtype == np.float32
    assert np.array_equal(out.astype(np.float64), round_to([0.1, 0.2], BINARY16))


def test_dot_step_two_roundings():
    # 1 + (1 + 2**-12)**2 rounds the product first, then the sum
    x = 1 + 2.0 ** -12
    expected = ctx_op("add", 1.0, ctx_op("mul", x, x, SINGLE), SINGLE)
    assert dot_step(1.0, x, x, SINGLE) == expected


def test_custom_format():
    bfloat16 = FloatFormat("bfloat16", 8, 7)
    assert bfloat16.unit_roundoff == 2.0 ** -8
    assert round_scalar(1 + 2.0 ** -8, bfloat16) == 1.0
