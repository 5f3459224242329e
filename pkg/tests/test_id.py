import numpy as np
import pytest

from mpid.errors import DegenerateError, DimensionError, UnderflowError
from mpid.id import (
    IDApprox, Variant, build_id, coefficient_matrix, default_pinv_tol, id_from_qr,
    id_pipeline, lemma_bound, rel_spectral_error,
)
from mpid.matrix import svd_small
from mpid.mgsqr import PivotedQR, mgsqr
from mpid.precision import BINARY16, DOUBLE, SIMULATED_HALF, SINGLE, round_matrix
from mpid.synth import gen_decay_matrix, profile


def fake_qr(R, piv, ctx=DOUBLE):
    R = np.asarray(R, dtype=float)
    k = R.shape[0]
    return PivotedQR(np.eye(max(k, 1))[:, :k], R, np.asarray(piv), k, ctx)


# coefficient matrix

def test_p_scalar_example():
    P = coefficient_matrix(fake_qr([[2.0, 1.0]], [0, 1]))
    assert np.array_equal(P, [[1.0, 0.5]])


def test_p_pseudo_inverse_drops_null_direction():
    R = [[1.0, 0.0, 1.0], [0.0, 0.0, 1.0]]
    P = coefficient_matrix(fake_qr(R, [0, 1, 2]), pinv_tol=1e-12)
    assert np.allclose(P, [[1, 0, 1], [0, 1, 0]], atol=1e-15)


def test_p_from_hand_qr():
    qr = mgsqr(np.array([[3.0, 1.0], [4.0, 1.0]]), 1)
    assert np.allclose(coefficient_matrix(qr), [[1.0, 0.28]], rtol=1e-15)


def test_p_permuted_columns():
    # piv = [2, 0, 1]: skeleton is column 2, T fills columns 0 and 1
    P = coefficient_matrix(fake_qr([[4.0, 2.0, 1.0]], [2, 0, 1]))
    assert np.array_equal(P, [[0.5, 0.25, 1.0]])


def test_p_degenerate():
    with pytest.raises(DegenerateError):
        coefficient_matrix(fake_qr([[0.0, 1.0]], [0, 1]))


def test_p_negative_tol():
    with pytest.raises(ValueError):
        coefficient_matrix(fake_qr([[2.0, 1.0]], [0, 1]), pinv_tol=-1)


@pytest.mark.parametrize("ctx", [DOUBLE, SINGLE, SIMULATED_HALF])
@pytest.mark.parametrize("precision", ["double", "ctx"])
def test_p_identity_block(ctx, precision):
    A = round_matrix(gen_decay_matrix(profile("slow", m=80, n=60, seed=1)), ctx.storage)
    qr = mgsqr(A, 12, ctx)
    P = coefficient_matrix(qr, precision=precision)
    assert np.array_equal(P[:, qr.piv[:12]], np.eye(12))
    # re-permuted P has the identity as leading block
    assert np.array_equal(P[:, qr.piv][:, :12], np.eye(12))


def test_ctx_solve_is_stored_in_half():
    A = round_matrix(gen_decay_matrix(profile("slow", m=80, n=60, seed=1)), BINARY16)
    qr = mgsqr(A, 8, SIMULATED_HALF)
    P = coefficient_matrix(qr, precision="ctx")
    assert np.array_equal(round_matrix(P, BINARY16), P)
    with pytest.raises(ValueError):
        coefficient_matrix(qr, precision="quad")


def test_default_pinv_tol():
    qr = fake_qr(np.ones((3, 10)), np.arange(10), SINGLE)
    assert default_pinv_tol(qr) == 10 * 2.0 ** -53
    assert default_pinv_tol(qr, "ctx") == 10 * 2.0 ** -24


# build_id and the pipeline

def test_duplicate_column_exact():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal(6), rng.standard_normal(6)
    A = np.column_stack([a, a, b])
    Ahat = build_id(A, id_pipeline(A, 2))
    assert np.linalg.norm(A - Ahat) <= 1e-14 * np.linalg.norm(A)


def test_identity_full_rank():
    approx = id_pipeline(np.eye(4), 4)
    assert np.array_equal(approx.indices, [0, 1, 2, 3])
    assert np.array_equal(approx.P, np.eye(4))
    assert np.array_equal(build_id(np.eye(4), approx), np.eye(4))


@pytest.mark.parametrize("seed", range(5))
def test_exact_rank_recovery(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((60, 7)) @ rng.standard_normal((7, 40))
    Ahat = build_id(A, id_pipeline(A, 7))
    assert np.linalg.norm(A - Ahat) <= 1e-12 * np.linalg.norm(A)


@pytest.mark.parametrize("ctx, ceiling", [(SINGLE, 1e-6), (SIMULATED_HALF, 1e-2)])
@pytest.mark.parametrize("seed", range(3))
def test_rank_one(ctx, ceiling, seed):
    rng = np.random.default_rng(seed)
    A = np.outer(rng.standard_normal(50), rng.standard_normal(30))
    for variant in (Variant.MIXED, Variant.LOW):
        approx = id_pipeline(A, 1, ctx, variant)
        assert rel_spectral_error(A, approx.reconstruct(A)) <= ceiling


@pytest.mark.parametrize("ctx, variant", [
    (DOUBLE, Variant.DOUBLE), (SINGLE, Variant.MIXED), (SINGLE, Variant.LOW),
    (SIMULATED_HALF, Variant.MIXED), (SIMULATED_HALF, Variant.LOW),
])
def test_skeleton_columns_bit_exact(ctx, variant):
    A = gen_decay_matrix(profile("medium", m=150, n=90, seed=2))
    approx = id_pipeline(A, 15, ctx, variant)
    Ahat = approx.reconstruct(A)
    source = round_matrix(A, ctx.storage) if variant is Variant.LOW else A
    assert np.array_equal(Ahat[:, approx.indices], source[:, approx.indices])
    assert len(set(approx.indices.tolist())) == 15
    assert approx.skeleton_source == ("low_matrix" if variant is Variant.LOW else "double_matrix")


def test_default_variant():
    A = gen_decay_matrix(profile("slow", m=30, n=20))
    assert id_pipeline(A, 3).variant is Variant.DOUBLE
    assert id_pipeline(A, 3, SINGLE).variant is Variant.MIXED


def test_double_variant_needs_double_ctx():
    A = gen_decay_matrix(profile("slow", m=30, n=20))
    qr = mgsqr(round_matrix(A, BINARY16), 3, SIMULATED_HALF)
    with pytest.raises(ValueError):
        id_from_qr(qr, Variant.DOUBLE)


def test_pipeline_underflow_propagates():
    with pytest.raises(UnderflowError):
        id_pipeline(np.full((5, 4), 1e-20), 1, SIMULATED_HALF)


def test_pipeline_overflow_propagates():
    with pytest.raises(OverflowError):
        id_pipeline(np.full((5, 4), 1e6), 1, SIMULATED_HALF)


def test_build_id_dimension_mismatch():
    approx = IDApprox(np.array([0]), np.ones((1, 3)), Variant.DOUBLE, DOUBLE)
    with pytest.raises(DimensionError):
        build_id(np.ones((2, 4)), approx)


# error metric

def test_rel_error_self():
    A = gen_decay_matrix(profile("slow", m=40, n=30))
    assert rel_spectral_error(A, A) <= 1e-10


def test_rel_error_diag():
    assert rel_spectral_error(np.diag([2.0, 1.0]), np.diag([2.0, 0.0])) == pytest.approx(0.5, rel=1e-10)


def test_rel_error_eckart_young():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((30, 20)) @ np.diag(0.7 ** np.arange(20))
    U, S, V = svd_small(A)
    for k in (1, 5, 10):
        Ak = (U[:, :k] * S[:k]) @ V[:, :k].T
        assert rel_spectral_error(A, Ak) == pytest.approx(S[k] / S[0], rel=1e-8)


def test_rel_error_zero_reference():
    with pytest.raises(DegenerateError):
        rel_spectral_error(np.zeros((2, 2)), np.eye(2))


def test_rel_error_shape_mismatch():
    with pytest.raises(DimensionError):
        rel_spectral_error(np.eye(2), np.eye(3))


# existence bound

def test_lemma_bound_values():
    c, e = lemma_bound(20, 1000, 1 / 21)
    assert c == pytest.approx(140.0036, abs=5e-5)
    assert c == np.sqrt(19601)
    assert e == pytest.approx(6.6668, abs=5e-5)
    assert lemma_bound(20, 1000, 0.0)[1] == 0.0


@pytest.mark.parametrize("k, n", [(0, 5), (5, 5)])
def test_lemma_bound_domain(k, n):
    with pytest.raises(ValueError):
        lemma_bound(k, n, 1.0)


def test_coefficient_norm_reported_against_bound():
    # the bound on ||P|| is existential; report only, it usually holds by a wide margin
    A = gen_decay_matrix(profile("slow", m=200, n=120, seed=4))
    approx = id_pipeline(A, 20)
    p_norm = np.linalg.norm(approx.P, 2)
    assert np.isfinite(p_norm) and p_norm >= 1.0


@pytest.fixture(scope="module")
def desk_errors():
    """Errors against the ground truth at k = 20 on the 1000 x 1000 datasets."""
    out = {}
    for name in ("slow", "medium", "fast"):
        A = gen_decay_matrix(profile(name))
        approx = {
            "double": id_pipeline(A, 20),
            "mixed": id_pipeline(A, 20, SINGLE, Variant.MIXED),
            "low": id_pipeline(A, 20, SINGLE, Variant.LOW),
        }
        recon = {v: a.reconstruct(A) for v, a in approx.items()}
        out[name] = {
            "truth": {v: rel_spectral_error(A, r) for v, r in recon.items()},
            "mixed_vs_double": rel_spectral_error(recon["double"], recon["mixed"]),
        }
    return out


@pytest.mark.parametrize("name", ["slow", "medium", "fast"])
def test_variant_ordering(desk_errors, name):
    e = desk_errors[name]["truth"]
    assert e["double"] <= e["mixed"] * (1 + 1e-3)
    assert abs(e["low"] - e["mixed"]) <= 0.1 * e["mixed"]


def test_slow_single_close_to_double(desk_errors):
    assert desk_errors["slow"]["mixed_vs_double"] <= 1e-6
