import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

ROOT = Path(__file__).resolve().parents[1]
CORE_DIR = ROOT / "packages" / "core"
if str(CORE_DIR) not in sys.path:
    sys.path.insert(0, str(CORE_DIR))

from errors import DependentBasisError, FieldMismatchError, PreconditionError  # noqa: E402
from families import max_kernel_tuples, tuples_to_polys  # noqa: E402
from gf import make_field, trace_to  # noqa: E402
from linpoly import (  # noqa: E402
    LinearizedPoly,
    SubspaceBasis,
    add,
    adjoint,
    annihilator,
    compose_mod,
    count_roots,
    dickson_matrix,
    evaluate,
    from_sigma_coeffs,
    kernel_basis,
    kernel_dimension,
    kernel_dimensions_batch,
    normalize,
    random_poly,
    rank,
    scale,
    sigma_coeffs,
    strip,
)


F16 = make_field(2, 1, 4)
F27 = make_field(3, 1, 3)
F64 = make_field(2, 1, 6)


def test_trace_polynomial_kernel_has_dimension_three():
    f = LinearizedPoly.from_coeffs(F16, 1, [1, 1, 1, 1])
    basis = kernel_basis(f)
    assert basis.dim == 3
    assert basis.is_independent()
    assert np.all(evaluate(f, basis.elems) == 0)


def test_eval_at_zero_is_zero_and_linear():
    f = LinearizedPoly.from_coeffs(F27, 1, [2, 5, 1])
    assert evaluate(f, 0) == 0
    z = F27.elements()
    w = z[::-1]
    assert np.array_equal(evaluate(f, z + w), evaluate(f, z) + evaluate(f, w))


def test_sigma_view_on_canonical_grid():
    # q^2-polinomio sobre F_{2^5}: a_j vive en la posición 2j mod 5
    ctx = make_field(2, 1, 5)
    f = LinearizedPoly.from_coeffs(ctx, 2, [3, 0, 7])
    assert f.grid == (3, 0, 0, 0, 7)
    assert f.degree == 2
    assert f.coeffs == (3, 0, 7)
    assert str(f) == "s=2;a=[3,0,7]"
    assert from_sigma_coeffs(ctx, 2, sigma_coeffs(f)) == f


def test_s_is_normalized_modulo_n():
    f = LinearizedPoly.from_coeffs(F16, 5, [1, 1])
    assert f.s == 1
    with pytest.raises(PreconditionError):
        LinearizedPoly.from_coeffs(F16, 2, [1, 1])


def test_zero_polynomial_kernel_is_whole_field():
    z = LinearizedPoly.zero(F16)
    assert z.degree == -1
    assert kernel_dimension(z) == F16.n
    with pytest.raises(PreconditionError):
        normalize(z)


def test_normalize_gives_leading_minus_one():
    f = LinearizedPoly.from_coeffs(F27, 1, [1, 4, 5])
    g = normalize(f)
    assert g.coeff(g.degree) == -F27.one
    assert kernel_dimension(g) == kernel_dimension(f)


def test_strip_removes_leading_sigma_power():
    f = LinearizedPoly.from_coeffs(F16, 1, [0, 0, 3, 1])
    g, j = strip(f)
    assert j == 2
    assert g.degree == 1
    assert kernel_dimension(g) == kernel_dimension(f)


def test_dickson_rank_matches_fq_rank():
    rng = np.random.default_rng(7)
    for _ in range(20):
        f = random_poly(F16, 1, 3, rng, monic=False, nonzero_a0=False)
        assert int(np.linalg.matrix_rank(dickson_matrix(f))) == rank(f)


def test_count_roots_matches_kernel_dimension():
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = random_poly(F64, 1, 3, rng)
        assert count_roots(f) == F64.q ** kernel_dimension(f)


def test_kernel_dimensions_batch_matches_scalar():
    rng = np.random.default_rng(3)
    polys = [random_poly(F16, 1, 2, rng) for _ in range(30)]
    coeffs = F16.GF(np.array([list(f.coeffs) for f in polys]))
    dims = kernel_dimensions_batch(F16, 1, coeffs)
    assert dims.tolist() == [kernel_dimension(f) for f in polys]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=26), min_size=1, max_size=3), st.sampled_from([1, 2]))
def test_kernel_dimension_bounded_by_sigma_degree(coeffs, s):
    f = LinearizedPoly.from_coeffs(F27, s, coeffs)
    if f.is_zero:
        return
    assert kernel_dimension(f) <= f.degree


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=63), min_size=6, max_size=6))
def test_adjoint_preserves_kernel_dimension(grid):
    f = LinearizedPoly(F64, 1, tuple(grid))
    g = adjoint(f)
    assert g.s == 5
    assert kernel_dimension(g) == kernel_dimension(f)
    assert adjoint(g) == f


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=15), min_size=4, max_size=4))
def test_adjoint_satisfies_trace_duality(grid):
    f = LinearizedPoly(F16, 1, tuple(grid))
    g = adjoint(f)
    z = F16.elements()
    x, y = np.meshgrid(z.view(np.ndarray), z.view(np.ndarray), indexing="ij")
    x, y = F16.GF(x.ravel()), F16.GF(y.ravel())
    assert np.array_equal(trace_to(F16, evaluate(f, x) * y), trace_to(F16, x * evaluate(g, y)))


def test_frobenius_powers_compose_to_identity():
    for ctx in (F16, F27, F64):
        n = ctx.n
        h = compose_mod(LinearizedPoly.monomial(ctx, 1, 1), LinearizedPoly.monomial(ctx, 1, n - 1))
        assert h == LinearizedPoly.identity(ctx)


def test_compose_with_identity_and_evaluation():
    rng = np.random.default_rng(5)
    f = random_poly(F16, 1, 2, rng)
    g = random_poly(F16, 1, 3, rng)
    assert compose_mod(f, LinearizedPoly.identity(F16)) == f
    h = compose_mod(f, g)
    z = F16.elements()
    assert np.array_equal(evaluate(h, z), evaluate(f, evaluate(g, z)))


def test_scale_and_add():
    f = LinearizedPoly.from_coeffs(F16, 1, [1, 1])
    g = LinearizedPoly.from_coeffs(F16, 1, [1, 0, 1])
    h = add(scale(f, 3), g)
    z = F16.elements()
    assert np.array_equal(evaluate(h, z), F16.GF(3) * evaluate(f, z) + evaluate(g, z))


def test_mismatched_fields_raise():
    f = LinearizedPoly.from_coeffs(F16, 1, [1, 1])
    with pytest.raises(FieldMismatchError):
        evaluate(f, F64.GF(3))


def test_annihilator_kernel_is_given_subspace():
    rng = np.random.default_rng(9)
    for dim in (1, 2, 3):
        while True:
            U = SubspaceBasis(F16, F16.GF(rng.integers(1, 16, size=dim)))
            if U.is_independent():
                break
        f = annihilator(U)
        assert f.degree == dim
        assert f.coeff(dim) == -F16.one
        assert np.all(evaluate(f, U.elems) == 0)
        assert kernel_dimension(f) == dim


def test_annihilator_rejects_dependent_elements():
    with pytest.raises(DependentBasisError):
        annihilator(SubspaceBasis(F16, F16.GF([3, 3])))


def test_annihilator_of_empty_basis_is_minus_x():
    f = annihilator(SubspaceBasis(F16, F16.GF.Zeros(0)))
    assert f.degree == 0 and f.coeff(0) == -F16.one


_MAX_KERNEL_F16 = {k: tuples_to_polys(F16, 1, max_kernel_tuples(F16, 1, k)) for k in (1, 2, 3)}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.integers(min_value=0, max_value=10**6))
def test_annihilator_of_kernel_recovers_monic_poly(k, pick):
    polys = _MAX_KERNEL_F16[k]
    f = polys[pick % len(polys)]
    assert annihilator(kernel_basis(f)) == f
