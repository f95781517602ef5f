import sys
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
CORE_DIR = ROOT / "packages" / "core"
if str(CORE_DIR) not in sys.path:
    sys.path.insert(0, str(CORE_DIR))

from errors import BudgetExceeded, ContradictionError, PreconditionError  # noqa: E402
from families import (  # noqa: E402
    APPENDIX_STAGES,
    DegreeN2Seed,
    TableID,
    adjoint_map,
    admissible_t,
    appendix_equivalent,
    appendix_solution_sets,
    binomial_has_max_kernel,
    derive_degree_n_minus_2,
    enumerate_max_kernel,
    gaussian_binomial,
    max_kernel_tuples,
    newrelt_check,
    table_condition,
    table_rows,
    table_solutions,
    trace2_classify,
    trace_family,
    tuples_to_polys,
    verify_table,
)
from gf import make_field  # noqa: E402
from linpoly import LinearizedPoly, evaluate, kernel_basis, kernel_dimension  # noqa: E402
from maxkernel import is_maximum_kernel  # noqa: E402


F16 = make_field(2, 1, 4)
F32 = make_field(2, 1, 5)
F64 = make_field(2, 1, 6)


def _span_char2(elems):
    # en característica 2 la suma es XOR sobre la codificación entera
    span = {0}
    for v in elems:
        span |= {x ^ v for x in span}
    return frozenset(span)


def brute_force_subspaces(order, k):
    """Subespacios de dimensión k de F_2^n contados generándolos desde k-subconjuntos."""
    found = set()
    for combo in combinations(range(1, order), k):
        span = _span_char2(combo)
        if len(span) == 2**k:
            found.add(span)
    return len(found)


@pytest.mark.parametrize("n,k,expected", [(4, 1, 15), (4, 2, 35), (4, 3, 15), (5, 2, 155), (6, 4, 651)])
def test_gaussian_binomial_values(n, k, expected):
    assert gaussian_binomial(n, k, 2) == expected


@pytest.mark.parametrize("ctx,k", [(F16, 1), (F16, 2), (F16, 3), (F32, 2)])
def test_counts_match_brute_force_subspaces(ctx, k):
    polys = enumerate_max_kernel(ctx, 1, k)
    assert len(polys) == brute_force_subspaces(ctx.order, k) == gaussian_binomial(ctx.n, k, ctx.q)
    kernels = {frozenset(int(v) for v in evaluate_kernel(f)) for f in polys}
    assert len(kernels) == len(polys)


def evaluate_kernel(f):
    return _span_char2(kernel_basis(f).as_ints())


def test_enumeration_is_sorted_and_skips_zero_a0():
    rows = max_kernel_tuples(F16, 1, 2)
    assert np.all(rows[:, 0] != 0)
    as_tuples = [tuple(r) for r in rows.tolist()]
    assert as_tuples == sorted(as_tuples)


def test_seed_sweep_for_n6_k4():
    rows = max_kernel_tuples(F64, 1, 4, strategy="seeds")
    assert rows.shape == (651, 4)
    polys = tuples_to_polys(F64, 1, rows[:25])
    assert all(kernel_dimension(f) == 4 for f in polys)


def test_auto_strategy_uses_seeds_when_over_budget():
    rows = max_kernel_tuples(F64, 1, 4)
    assert rows.shape[0] == 651


def test_budget_exceeded_for_exhaustive_sweep():
    with pytest.raises(BudgetExceeded):
        max_kernel_tuples(F64, 1, 3, budget=1000)
    with pytest.raises(PreconditionError):
        max_kernel_tuples(F32, 1, 2, strategy="seeds")


def test_degree_zero_enumeration_is_minus_x():
    polys = enumerate_max_kernel(F16, 1, 0)
    assert len(polys) == 1 and polys[0].degree == 0


def test_workers_give_same_result():
    ctx = make_field(3, 1, 3)
    assert np.array_equal(max_kernel_tuples(ctx, 1, 2, workers=2), max_kernel_tuples(ctx, 1, 2))


def test_trace_family_has_kernel_dimension_n_minus_m():
    rng = np.random.default_rng(1)
    for m in (1, 2, 3):
        alpha, beta = rng.integers(1, 64, size=2)
        f = trace_family(F64, alpha, beta, m)
        assert f.degree == 6 - m
        assert is_maximum_kernel(f)
    with pytest.raises(PreconditionError):
        trace_family(F64, 0, 1)


def test_binomial_criterion_matches_direct_check():
    for k in (1, 2, 3):
        for a0 in range(1, 16):
            f = LinearizedPoly.from_coeffs(F16, 1, [a0] + [0] * (k - 1) + [1])
            assert binomial_has_max_kernel(F16, a0, k) == is_maximum_kernel(f)


def test_derive_n2_closes_exactly_on_maximum_kernel_polys():
    polys = set(enumerate_max_kernel(F16, 1, 2, strategy="exhaustive"))
    derived = set()
    for a0 in range(1, 16):
        for a1 in range(16):
            f, ok = derive_degree_n_minus_2(DegreeN2Seed(F16, 1, a0, a1))
            if ok:
                derived.add(f)
    assert derived == polys


def test_derive_n2_requires_n_at_least_four():
    with pytest.raises(PreconditionError):
        DegreeN2Seed(make_field(2, 1, 3), 1, 1, 1)


def test_admissible_t():
    assert admissible_t(4) == [2, 4]
    assert admissible_t(5) == [2, 3, 4, 5]
    assert admissible_t(6) == [2, 6]


@pytest.mark.parametrize("ctx", [F16, F32, F64])
def test_cross_relations_hold_for_every_degree_n_minus_2_poly(ctx):
    polys = enumerate_max_kernel(ctx, 1, ctx.n - 2)
    for f in polys:
        for t in admissible_t(ctx.n):
            assert newrelt_check(f, t), (str(f), t)


def test_vanishing_a1_impossible_for_odd_n():
    for f in enumerate_max_kernel(F32, 1, 3):
        assert f.coeff(1) != 0


@pytest.mark.parametrize("ctx", [F16, F64])
def test_vanishing_a1_gives_trace_to_quadratic_subfield(ctx):
    hits = [f for f in enumerate_max_kernel(ctx, 1, ctx.n - 2) if f.coeff(1) == 0]
    assert hits
    for f in hits:
        alpha, beta = trace2_classify(f)
        rebuilt = trace_family(ctx, alpha, beta, 2)
        z = ctx.elements()
        assert np.array_equal(evaluate(rebuilt, z), evaluate(f, z))


def test_trace2_classify_rejects_odd_n_and_nonzero_a1():
    f = trace_family(F16, 1, 1, 1)
    with pytest.raises(PreconditionError):
        trace2_classify(f)
    ctx = make_field(2, 1, 5)
    g = LinearizedPoly.from_coeffs(ctx, 1, [1, 0, 3, 1])
    with pytest.raises((ContradictionError, PreconditionError)):
        trace2_classify(g)


def test_table_condition_examples():
    assert table_condition(F16, TableID(4, 1, 2, "binomial"), [1, 0])
    assert table_condition(F16, TableID(4, 1, 3, "trace"), [1, 1, 1])
    with pytest.raises(PreconditionError):
        table_condition(F16, TableID(4, 1, 2, "binomial"), [1])
    with pytest.raises(PreconditionError):
        table_condition(F16, TableID(4, 1, 2, "nonexistent"), [1, 0])
    with pytest.raises(PreconditionError):
        table_condition(F32, TableID(4, 1, 2, "binomial"), [1, 0])


def test_table_rows_registry():
    assert len(table_rows(1)) == 4
    assert {t.s for t in table_rows(2)} == {1, 2}
    assert len(table_rows(3)) == 8
    with pytest.raises(PreconditionError):
        table_rows(2, s=3)


def test_table_one_matches_enumeration_q2():
    report = verify_table(1, 2)
    assert report.passed
    assert [d.max_kernel for d in report.degrees] == [15, 35, 15]


@pytest.mark.slow
def test_table_one_matches_enumeration_q3():
    assert verify_table(1, 3).passed


@pytest.mark.parametrize("s", [1, 2])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_table_two_small_degrees(s, k):
    report = verify_table(2, 2, s=s, k=k)
    assert report.passed
    assert report.degrees[0].max_kernel == gaussian_binomial(5, k, 2)


@pytest.mark.slow
@pytest.mark.parametrize("s", [1, 2])
def test_table_two_full(s):
    assert verify_table(2, 2, s=s).passed


@pytest.mark.parametrize("k", [2, 4])
def test_table_three(k):
    report = verify_table(3, 2, k=k)
    assert report.passed
    assert report.degrees[0].max_kernel == gaussian_binomial(6, k, 2)


@pytest.mark.slow
def test_table_three_degree_three():
    assert verify_table(3, 2, k=3).passed


def test_table_three_degree_five_is_skipped_but_rows_checked():
    report = verify_table(3, 2, k=5)
    assert report.degrees[0].skipped
    assert report.rows[0].solutions == 63
    assert report.passed


def test_trace2_row_of_table_three():
    sols = table_solutions(F64, TableID(6, 1, 4, "trace2"))
    assert sols.shape[0] > 0
    assert np.all(sols[:, 1] == 0) and np.all(sols[:, 3] == 0)


def test_adjoint_maps_s2_results_to_s3():
    for k in (1, 2):
        image = set(adjoint_map(enumerate_max_kernel(F32, 2, k)))
        assert image == set(enumerate_max_kernel(F32, 3, k))


@pytest.mark.parametrize(
    "label,ctx,s",
    [("A1", F16, 1), ("A2", F32, 1), ("A2", F32, 2), ("A3", F32, 1), ("A3", F32, 2), ("A4", F64, 1), ("A6", F64, 1)],
)
def test_appendix_stages_are_equivalent(label, ctx, s):
    sets = appendix_solution_sets(ctx, s, label)
    assert set(sets) >= {"sigma", "sigma_prime", "sigma_star"}
    assert appendix_equivalent(ctx, s, label)
    k = APPENDIX_STAGES[label].k
    expected = {tuple(r) for r in max_kernel_tuples(ctx, s, k).tolist()}
    assert sets["sigma_star"] == expected


@pytest.mark.slow
def test_appendix_a5_equivalent():
    assert appendix_equivalent(F64, 1, "A5")


def test_appendix_unknown_label():
    with pytest.raises(PreconditionError):
        appendix_solution_sets(F16, 1, "A9")
    with pytest.raises(PreconditionError):
        appendix_solution_sets(F16, 1, "A2")
