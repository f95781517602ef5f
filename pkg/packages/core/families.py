"""
Familias cerradas y tablas de q^s-polinomios con núcleo máximo para n = 4, 5, 6.

APIs:
- gaussian_binomial, admissible_t
- trace_family, trace_row_condition, binomial_has_max_kernel
- DegreeN2Seed, derive_degree_n_minus_2, derive_n2_batch
- newrelt_check, trace2_classify
- TableID, table_rows, table_condition, table_solutions, verify_table
- APPENDIX_STAGES, appendix_solution_sets, appendix_equivalent
- enumerate_max_kernel, max_kernel_tuples
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Optional, Sequence

import galois
import numpy as np

from errors import (
    BudgetExceeded,
    ContradictionError,
    NotMaximumKernelError,
    PreconditionError,
)
from gf import FieldCtx, FieldElem, frobenius_q, make_field, norm_to
from linpoly import LinearizedPoly, normalize
from maxkernel import is_maximum_kernel, max_kernel_mask
from settings import DEFAULT_BUDGET


logger = logging.getLogger("maxker.families")

CHUNK = 2**16


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def admissible_t(n: int) -> list[int]:
    return [t for t in range(2, n + 1) if gcd(t - 1, n) == 1]


class _Ops:
    """Potencias sigma abreviadas: P(x, 2, 1, 0) = x^{sigma^2 + sigma + 1}."""

    def __init__(self, ctx: FieldCtx, s: int) -> None:
        self.ctx = ctx
        self.s = s

    def P(self, x: FieldElem, *js: int) -> FieldElem:
        result = frobenius_q(self.ctx, x, self.s * js[0])
        for j in js[1:]:
            result = result * frobenius_q(self.ctx, x, self.s * j)
        return result

    def N(self, x: FieldElem, m: int = 1) -> FieldElem:
        return norm_to(self.ctx, x, m)

    def const(self, value: int) -> int:
        return value % self.ctx.p


def _field_arrays(ctx: FieldCtx, coeffs) -> list[FieldElem]:
    arr = ctx.GF(np.asarray(coeffs, dtype=np.int64))
    if arr.ndim == 1:
        return [arr[j] for j in range(arr.shape[0])]
    return [arr[:, j] for j in range(arr.shape[1])]


def _eq(x: FieldElem, y) -> np.ndarray:
    return np.asarray(x == y)


def _nonzero(x: FieldElem) -> np.ndarray:
    return np.asarray(x != 0)


# --- familias cerradas -----------------------------------------------------


def trace_family(ctx: FieldCtx, alpha, beta, m: int = 1, s: int = 1) -> LinearizedPoly:
    """alpha * Tr_{q^n/q^m}(beta x) como q^s-polinomio."""
    alpha, beta = ctx.GF(int(alpha)), ctx.GF(int(beta))
    if alpha == 0 or beta == 0:
        raise PreconditionError("alpha y beta deben ser no nulos")
    if m < 1 or ctx.n % m:
        raise PreconditionError(f"m={m} no divide n={ctx.n}")
    grid = ctx.GF.Zeros(ctx.n)
    for j in range(ctx.n // m):
        grid[j * m] = alpha * frobenius_q(ctx, beta, j * m)
    return LinearizedPoly(ctx, s, tuple(int(v) for v in grid))


def trace_row_condition(ctx: FieldCtx, s: int, m: int, coeffs) -> np.ndarray:
    """Pertenencia de (a_0, ..., a_{n-m}) (principal -1) a la familia mónica Tr_{q^n/q^m}(lambda x)."""
    a = _field_arrays(ctx, coeffs) if not isinstance(coeffs, list) else coeffs
    n = ctx.n
    k = n - m
    if len(a) not in (k, k + 1):
        raise PreconditionError(f"se esperaban {k} coeficientes, hay {len(a)}")
    if len(a) == k:
        a = a + [-ctx.GF.Ones(np.shape(a[0]))]
    ops = _Ops(ctx, s)
    ok = _eq(ops.N(-a[0], m), 1)
    running = a[0]
    for j in range(1, k + 1):
        if j % m:
            ok = ok & _eq(a[j], 0)
            continue
        running = -running * ops.P(a[0], j)
        ok = ok & _eq(a[j], running)
    return ok


def binomial_has_max_kernel(ctx: FieldCtx, a0, k: int, s: int = 1) -> bool:
    if not 1 <= k <= ctx.n - 1:
        raise PreconditionError(f"k={k} fuera de [1, n-1]")
    if gcd(s, ctx.n) != 1:
        raise PreconditionError(f"gcd(s={s}, n={ctx.n}) != 1")
    if ctx.n % k:
        return False
    return bool(norm_to(ctx, ctx.GF(int(a0)), k) == 1)


# --- sigma-grado n-2 ------------------------------------------------------


@dataclass(frozen=True)
class DegreeN2Seed:
    ctx: FieldCtx
    s: int
    a0: int
    a_n3: int

    def __post_init__(self) -> None:
        if self.ctx.n < 4:
            raise PreconditionError(f"se requiere n >= 4 (n={self.ctx.n})")
        if gcd(self.s, self.ctx.n) != 1:
            raise PreconditionError(f"gcd(s={self.s}, n={self.ctx.n}) != 1")


def derive_n2_batch(ctx: FieldCtx, s: int, a0: FieldElem, a_n3: FieldElem) -> tuple[list[FieldElem], np.ndarray]:
    """Coeficientes (a_0, g_1, ..., g_{n-4}, a_{n-3}) y máscara de las dos condiciones de cierre."""
    n = ctx.n
    if n < 4:
        raise PreconditionError(f"se requiere n >= 4 (n={n})")
    ops = _Ops(ctx, s)
    g = [a0, -ops.P(a0, 1, 0) * ops.P(a_n3, 2)]
    c2 = ops.P(a_n3, 2)
    for j in range(2, n - 2):
        g.append(-ops.P(g[j - 2], 2) * a0 - c2 * ops.P(g[j - 1], 1) * a0)
    closing = _eq(a0 * (ops.P(g[n - 4], 2) + ops.P(a_n3, 2, 1)), 1) & _eq(a_n3, g[n - 3])
    coeffs = g[: n - 3] + [a_n3]
    return coeffs, closing


def derive_degree_n_minus_2(seed: DegreeN2Seed) -> tuple[LinearizedPoly, bool]:
    ctx = seed.ctx
    coeffs, ok = derive_n2_batch(ctx, seed.s, ctx.GF(seed.a0), ctx.GF(seed.a_n3))
    body = [int(c) for c in coeffs] + [int(-ctx.one)]
    return LinearizedPoly.from_coeffs(ctx, seed.s, body), bool(ok)


def newrelt_check(f: LinearizedPoly, t: int) -> bool:
    """Relaciones cruzadas entre coeficientes de un q-polinomio de q-grado n-2 con núcleo máximo."""
    ctx = f.ctx
    n = ctx.n
    if f.s != 1:
        raise PreconditionError("las relaciones se enuncian para q-polinomios (s = 1)")
    if t < 2 or gcd(t - 1, n) != 1:
        raise PreconditionError(f"t={t} no es admisible: gcd(t-1, n) != 1")
    g = normalize(f)
    if g.degree != n - 2:
        raise PreconditionError(f"se requiere q-grado n-2 = {n - 2}, hay {g.degree}")
    if not is_maximum_kernel(g, "matrix"):
        raise NotMaximumKernelError(f"{g} no tiene núcleo máximo")

    def a(i: int) -> FieldElem:
        return ctx.GF(g.grid[i % n])

    S = n - t + 1

    def fr(x: FieldElem, *js: int) -> FieldElem:
        result = frobenius_q(ctx, x, js[0] * S)
        for j in js[1:]:
            result = result * frobenius_q(ctx, x, j * S)
        return result

    sign = ctx.GF((-1) ** n % ctx.p)
    a_t2, a_nt = a(t - 2), a(n - t)
    a_n2t1, a_2t3, a_3t4 = a(n - 2 * t + 1), a(2 * t - 3), a(3 * t - 4)
    if a_t2 == 0 or a_nt == 0:
        return False
    rel1 = a_n2t1 * fr(a_t2, 2, 1) == -fr(a_nt, 1, 0) * fr(a_2t3, 2)
    rel2 = -a_nt * (-fr(a_t2, 1) * fr(a_3t4, 2) + fr(a_2t3, 2, 1)) == fr(a_t2, 2, 1, 0)
    rel3 = norm_to(ctx, a_nt) == sign * norm_to(ctx, a_t2)
    rel4 = norm_to(ctx, a_n2t1) == sign * norm_to(ctx, a_2t3)
    return bool(rel1 and rel2 and rel3 and rel4)


def trace2_classify(f: LinearizedPoly) -> tuple[FieldElem, FieldElem]:
    """(alpha, beta) con f = alpha Tr_{q^n/q^2}(beta x) para f de sigma-grado n-2, núcleo máximo y a_1 = 0."""
    ctx = f.ctx
    n = ctx.n
    g = normalize(f)
    if g.degree != n - 2:
        raise PreconditionError(f"se requiere sigma-grado n-2 = {n - 2}")
    if g.coeff(1) != 0:
        raise PreconditionError("el coeficiente de x^{q^s} debe ser 0")
    if not is_maximum_kernel(g, "matrix"):
        raise NotMaximumKernelError(f"{g} no tiene núcleo máximo")
    if n % 2:
        raise ContradictionError(f"n={n} impar con a_1 = 0 y núcleo máximo")
    top = f.s * (n - 2)
    lam = ctx.GF.elements[1:]
    ratio = lam * frobenius_q(ctx, lam, top) ** -1
    hits = np.flatnonzero(np.asarray(ratio == -g.coeff(0)))
    if hits.size == 0:
        raise ContradictionError(f"no existe lambda con lambda^(1 - sigma^(n-2)) = -a_0 para {g}")
    beta = lam[hits[0]]
    alpha = f.coeff(n - 2) * frobenius_q(ctx, beta, top) ** -1
    rebuilt = trace_family(ctx, alpha, beta, 2, f.s)
    if rebuilt.grid != f.grid:
        raise ContradictionError(f"la reconstrucción con lambda={int(beta)} no coincide con {f}")
    return alpha, beta


# --- tablas --------------------------------------------------------------


@dataclass(frozen=True)
class TableID:
    n: int
    s: int
    k: int
    row: str

    @property
    def label(self) -> str:
        return f"n{self.n}-s{self.s}-k{self.k}-{self.row}"


_TABLE_N = {1: 4, 2: 5, 3: 6}
_TABLE_S = {1: (1,), 2: (1, 2), 3: (1,)}
_ROWS = {
    4: [(3, "trace"), (2, "binomial"), (2, "general"), (1, "binomial")],
    5: [(4, "trace"), (3, "general"), (2, "general"), (1, "binomial")],
    6: [
        (5, "trace"),
        (4, "general"),
        (4, "trace2"),
        (3, "general"),
        (3, "trace3"),
        (2, "general"),
        (2, "binomial"),
        (1, "binomial"),
    ],
}


def table_rows(table: int, s: Optional[int] = None) -> list[TableID]:
    if table not in _TABLE_N:
        raise PreconditionError(f"tabla desconocida: {table}")
    n = _TABLE_N[table]
    s_values = _TABLE_S[table] if s is None else (s,)
    if any(v not in _TABLE_S[table] for v in s_values):
        raise PreconditionError(f"s={s} no está cubierto por la tabla {table}")
    return [TableID(n, sv, k, row) for sv in s_values for k, row in _ROWS[n]]


def _valid_id(tid: TableID) -> None:
    if tid.n not in _ROWS or (tid.k, tid.row) not in _ROWS[tid.n]:
        raise PreconditionError(f"fila inexistente: {tid}")
    table = next(t for t, n in _TABLE_N.items() if n == tid.n)
    if tid.s not in _TABLE_S[table]:
        raise PreconditionError(f"s={tid.s} no está cubierto por la tabla de n={tid.n}")


def _general_n4_k2(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
    a0, a1 = a
    P = ops.P
    return _eq(ops.N(a0), 1) & _eq(P(a1, 1, 0), P(a0, 2, 1, 0) - P(a0, 1))


def _general_n5_k3(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
    a0, a1, a2 = a
    P = ops.P
    return (
        _eq(ops.N(a0), 1)
        & _eq(a1, -P(a0, 1, 0) * P(a2, 2))
        & _eq(-P(a0, 3, 2, 0) * P(a2, 4) + a0 * P(a2, 2, 1), 1)
    )


def _general_n5_k2(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
    a0, a1 = a
    P = ops.P
    return _eq(ops.N(a0), ops.const(-1)) & _eq(P(a1, 1, 0) + P(a0, 1), P(a1, 3) * P(a0, 2, 1, 0))


def _general_n6_k4(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
    a0, a1, a2, a3 = a
    P = ops.P
    return (
        _nonzero(a1)
        & _eq(ops.N(a0), 1)
        & _eq(a0 * (-P(a0, 4, 2) + P(a3, 5, 4) * P(a0, 4, 3, 2) + P(a3, 2, 1)), 1)
        & _eq(a1, -P(a0, 1, 0) * P(a3, 2))
        & _eq(a2, -P(a0, 2, 0) + P(a3, 3, 2) * P(a0, 2, 1, 0))
        & _eq(a3, P(a3, 4) * P(a0, 3, 2, 0) + P(a3, 2) * P(a0, 3, 1, 0) - P(a0, 3, 2, 1, 0) * P(a3, 4, 3, 2))
    )


def _general_n6_k3(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
    a0, a1, a2 = a
    P = ops.P
    return (
        _eq(ops.N(a0), 1)
        & _eq(P(a0, 3, 1, 0) + P(a2, 3) * P(a1, 2) * P(a0, 1, 0) - P(a2, 1) * a1, P(a0, 1))
        & _eq(P(a2, 1, 0), -P(a0, 3, 2, 1, 0) * P(a1, 4) - P(a1, 1))
        & _eq(P(a1, 1, 0), a2 * P(a0, 1) + P(a0, 2, 1, 0) * P(a2, 3))
    )


def _a4_w(ops: _Ops, a0: FieldElem, a1: FieldElem) -> FieldElem:
    P = ops.P
    return P(a0, 3) * P(a1, 4) + P(a1, 2) * (P(a0, 4) + P(a1, 4, 3))


def _general_n6_k2(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
    a0, a1 = a
    P = ops.P
    base = P(a0, 1) + P(a1, 1, 0)
    return (
        _nonzero(a1)
        & _eq(ops.N(a0), 1)
        & _eq(frobenius_q(ops.ctx, base, 3 * ops.s), P(a0, 5, 4, 3) * base)
        & _eq(_a4_w(ops, a0, a1) * P(a0, 1, 0), -a1)
    )


def _binomial_row(k: int, m: int) -> Callable[[_Ops, list[FieldElem]], np.ndarray]:
    def check(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
        ok = _eq(ops.N(a[0], m), 1)
        for x in a[1:]:
            ok = ok & _eq(x, 0)
        return ok

    return check


def _trace_row(m: int) -> Callable[[_Ops, list[FieldElem]], np.ndarray]:
    def check(ops: _Ops, a: list[FieldElem]) -> np.ndarray:
        return trace_row_condition(ops.ctx, ops.s, m, list(a))

    return check


_ROW_CHECKS: dict[tuple[int, int, str], Callable[[_Ops, list[FieldElem]], np.ndarray]] = {
    (4, 3, "trace"): _trace_row(1),
    (4, 2, "binomial"): _binomial_row(2, 2),
    (4, 2, "general"): _general_n4_k2,
    (4, 1, "binomial"): _binomial_row(1, 1),
    (5, 4, "trace"): _trace_row(1),
    (5, 3, "general"): _general_n5_k3,
    (5, 2, "general"): _general_n5_k2,
    (5, 1, "binomial"): _binomial_row(1, 1),
    (6, 5, "trace"): _trace_row(1),
    (6, 4, "general"): _general_n6_k4,
    (6, 4, "trace2"): _trace_row(2),
    (6, 3, "general"): _general_n6_k3,
    (6, 3, "trace3"): _trace_row(3),
    (6, 2, "general"): _general_n6_k2,
    (6, 2, "binomial"): _binomial_row(2, 2),
    (6, 1, "binomial"): _binomial_row(1, 1),
}


def table_mask(ctx: FieldCtx, tid: TableID, a: list[FieldElem]) -> np.ndarray:
    _valid_id(tid)
    if ctx.n != tid.n:
        raise PreconditionError(f"la fila {tid.label} es para n={tid.n}, el cuerpo tiene n={ctx.n}")
    if len(a) != tid.k:
        raise PreconditionError(f"la fila {tid.label} espera {tid.k} coeficientes, hay {len(a)}")
    return _ROW_CHECKS[(tid.n, tid.k, tid.row)](_Ops(ctx, tid.s), a)


def table_condition(ctx: FieldCtx, tid: TableID, coeffs: Sequence[int]) -> bool:
    """Evalúa el sistema de la fila sobre (a_0, ..., a_{k-1}) con coeficiente principal -1."""
    values = [int(c) for c in coeffs]
    if any(not 0 <= c < ctx.order for c in values):
        raise PreconditionError(f"coeficientes fuera de [0, {ctx.order})")
    return bool(table_mask(ctx, tid, [ctx.GF(c) for c in values]))


# --- enumeración ---------------------------------------------------------


def _check_budget(needed: int, budget: Optional[int]) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    if needed > budget:
        raise BudgetExceeded(needed, budget)


def _product_rows(Q: int, width: int, start: int, stop: int, first_offset: int = 0) -> np.ndarray:
    """Filas [start, stop) del producto cartesiano en orden lexicográfico (columna 0 más significativa)."""
    idx = np.arange(start, stop, dtype=np.int64)
    rows = np.empty((idx.size, width), dtype=np.int64)
    for j in range(width - 1, -1, -1):
        rows[:, j] = idx % Q
        idx //= Q
    rows[:, 0] += first_offset
    return rows


def _sort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    return rows[np.lexsort(rows.T[::-1])]


def _scan_exhaustive(ctx: FieldCtx, s: int, k: int, a0_start: int, a0_stop: int, method: str) -> np.ndarray:
    Q = ctx.order
    per_a0 = Q ** (k - 1)
    total = (a0_stop - a0_start) * per_a0
    found = []
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        rows = _product_rows(Q, k, start, stop, first_offset=a0_start)
        mask = max_kernel_mask(ctx, s, ctx.GF(rows), method)
        found.append(rows[mask])
        logger.debug("barrido k=%d: %d/%d tuplas", k, stop, total)
    if not found:
        return np.empty((0, k), dtype=np.int64)
    return np.concatenate(found)


def _scan_worker(spec: str, s: int, k: int, a0_start: int, a0_stop: int, method: str) -> np.ndarray:
    from codec import parse_field

    return _scan_exhaustive(parse_field(spec), s, k, a0_start, a0_stop, method)


def _scan_seeds(ctx: FieldCtx, s: int) -> np.ndarray:
    Q = ctx.order
    n = ctx.n
    found = []
    for start in range(0, (Q - 1) * Q, CHUNK):
        stop = min((Q - 1) * Q, start + CHUNK)
        seeds = _product_rows(Q, 2, start, stop, first_offset=1)
        coeffs, ok = derive_n2_batch(ctx, s, ctx.GF(seeds[:, 0]), ctx.GF(seeds[:, 1]))
        body = np.stack([c.view(np.ndarray).astype(np.int64) for c in coeffs], axis=1)
        found.append(body[ok])
    if not found:
        return np.empty((0, n - 2), dtype=np.int64)
    return np.concatenate(found)


def _choose_strategy(ctx: FieldCtx, k: int, strategy: str, budget: int) -> str:
    if strategy not in ("auto", "exhaustive", "seeds"):
        raise PreconditionError(f"estrategia desconocida: {strategy}")
    seeds_ok = ctx.n >= 4 and k == ctx.n - 2
    if strategy == "seeds" and not seeds_ok:
        raise PreconditionError("la estrategia por semillas requiere n >= 4 y k = n - 2")
    if strategy == "auto":
        return "seeds" if seeds_ok and ctx.order**k > budget else "exhaustive"
    return strategy


def max_kernel_tuples(
    ctx: FieldCtx,
    s: int,
    k: int,
    budget: Optional[int] = None,
    workers: int = 1,
    strategy: str = "auto",
    method: str = "recursion",
) -> np.ndarray:
    """Cuerpos mónicos (a_0, ..., a_{k-1}) con núcleo máximo, ordenados con a_0 como clave principal."""
    if gcd(s, ctx.n) != 1:
        raise PreconditionError(f"gcd(s={s}, n={ctx.n}) != 1")
    if not 0 <= k <= ctx.n - 1:
        raise PreconditionError(f"k={k} fuera de [0, n-1]")
    budget = DEFAULT_BUDGET if budget is None else budget
    if k == 0:
        return np.empty((1, 0), dtype=np.int64)
    chosen = _choose_strategy(ctx, k, strategy, budget)
    Q = ctx.order
    if chosen == "seeds":
        _check_budget(Q * Q, budget)
        logger.info("n=%d k=%d: enumeración por semillas (a_0, a_{n-3})", ctx.n, k)
        return _sort_rows(_scan_seeds(ctx, s))
    _check_budget(Q**k, budget)
    if workers > 1 and Q > 2:
        bounds = np.linspace(1, Q, num=min(workers, Q - 1) + 1, dtype=np.int64)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_scan_worker, ctx.spec, s, k, int(lo), int(hi), method)
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            parts = [fut.result() for fut in futures]
        return _sort_rows(np.concatenate(parts))
    return _sort_rows(_scan_exhaustive(ctx, s, k, 1, Q, method))


def tuples_to_polys(ctx: FieldCtx, s: int, rows: np.ndarray) -> list[LinearizedPoly]:
    lead = int(-ctx.one)
    return [LinearizedPoly.from_coeffs(ctx, s, [int(c) for c in row] + [lead]) for row in rows]


def enumerate_max_kernel(
    ctx: FieldCtx,
    s: int,
    k: int,
    budget: Optional[int] = None,
    workers: int = 1,
    strategy: str = "auto",
    method: str = "recursion",
) -> list[LinearizedPoly]:
    rows = max_kernel_tuples(ctx, s, k, budget=budget, workers=workers, strategy=strategy, method=method)
    return tuples_to_polys(ctx, s, rows)


# --- soluciones de filas y verificación de tablas ---------------------------


def _trace_candidates(ctx: FieldCtx, s: int, m: int) -> np.ndarray:
    # a_0 libre; el resto lo fija la propia condición de la fila
    k = ctx.n - m
    a0 = ctx.GF(np.arange(1, ctx.order, dtype=np.int64))
    ops = _Ops(ctx, s)
    cols = [a0]
    running = a0
    for j in range(1, k):
        if j % m:
            cols.append(ctx.GF.Zeros(a0.shape))
        else:
            running = -running * ops.P(a0, j)
            cols.append(running)
    return np.stack([c.view(np.ndarray).astype(np.int64) for c in cols], axis=1)


def _binomial_candidates(ctx: FieldCtx, k: int) -> np.ndarray:
    rows = np.zeros((ctx.order - 1, k), dtype=np.int64)
    rows[:, 0] = np.arange(1, ctx.order)
    return rows


def _seed_candidates_n6_k4(ctx: FieldCtx, s: int) -> np.ndarray:
    # a_1 y a_2 quedan fijados por (a_0, a_3) en las ecuaciones de la fila
    ops = _Ops(ctx, s)
    seeds = _product_rows(ctx.order, 2, 0, ctx.order**2)
    a0, a3 = ctx.GF(seeds[:, 0]), ctx.GF(seeds[:, 1])
    a1 = -ops.P(a0, 1, 0) * ops.P(a3, 2)
    a2 = -ops.P(a0, 2, 0) + ops.P(a3, 3, 2) * ops.P(a0, 2, 1, 0)
    return np.stack([x.view(np.ndarray).astype(np.int64) for x in (a0, a1, a2, a3)], axis=1)


def _row_candidates(ctx: FieldCtx, tid: TableID, budget: int) -> np.ndarray:
    if tid.row == "trace":
        return _trace_candidates(ctx, tid.s, 1)
    if tid.row == "trace2":
        return _trace_candidates(ctx, tid.s, 2)
    if tid.row == "trace3":
        return _trace_candidates(ctx, tid.s, 3)
    if tid.row == "binomial":
        return _binomial_candidates(ctx, tid.k)
    if (tid.n, tid.k) == (6, 4):
        return _seed_candidates_n6_k4(ctx, tid.s)
    _check_budget(ctx.order**tid.k, budget)
    return _product_rows(ctx.order, tid.k, 0, ctx.order**tid.k)


def table_solutions(ctx: FieldCtx, tid: TableID, budget: Optional[int] = None) -> np.ndarray:
    """Tuplas (a_0, ..., a_{k-1}) que satisfacen la fila, ordenadas."""
    budget = DEFAULT_BUDGET if budget is None else budget
    candidates = _row_candidates(ctx, tid, budget)
    found = []
    for start in range(0, candidates.shape[0], CHUNK):
        block = candidates[start : start + CHUNK]
        mask = table_mask(ctx, tid, _field_arrays(ctx, block))
        found.append(block[mask])
    if not found:
        return np.empty((0, tid.k), dtype=np.int64)
    return _sort_rows(np.concatenate(found))


def _as_set(rows: np.ndarray) -> set[tuple[int, ...]]:
    return {tuple(int(v) for v in row) for row in rows}


@dataclass
class RowResult:
    table_id: TableID
    solutions: int
    all_max_kernel: bool


@dataclass
class DegreeResult:
    s: int
    k: int
    max_kernel: int
    union: int
    equal: bool
    skipped: bool = False
    missing: list = field(default_factory=list)
    extra: list = field(default_factory=list)


@dataclass
class TableVerification:
    table: int
    field: str
    rows: list[RowResult]
    degrees: list[DegreeResult]

    @property
    def passed(self) -> bool:
        return all(d.equal or d.skipped for d in self.degrees) and all(r.all_max_kernel for r in self.rows)


def field_for_table(table: int, q: int) -> FieldCtx:
    if table not in _TABLE_N:
        raise PreconditionError(f"tabla desconocida: {table}")
    primes, exponents = galois.factors(q)
    if len(primes) != 1:
        raise PreconditionError(f"q={q} no es potencia de primo")
    return make_field(int(primes[0]), int(exponents[0]), _TABLE_N[table])


def verify_table(
    table: int,
    q: int,
    s: Optional[int] = None,
    budget: Optional[int] = None,
    workers: int = 1,
    k: Optional[int] = None,
) -> TableVerification:
    """Compara la unión de las filas con la enumeración, grado a grado.

    Los grados cuya enumeración supera el presupuesto se marcan como omitidos; sus
    filas se siguen comprobando solución por solución.
    """
    ctx = field_for_table(table, q)
    budget = DEFAULT_BUDGET if budget is None else budget
    rows = [tid for tid in table_rows(table, s) if k is None or tid.k == k]
    if not rows:
        raise PreconditionError(f"la tabla {table} no tiene filas con k={k}")
    row_results: list[RowResult] = []
    degrees: list[DegreeResult] = []
    for sv in sorted({tid.s for tid in rows}):
        for kk in sorted({tid.k for tid in rows if tid.s == sv}, reverse=True):
            try:
                expected: Optional[set[tuple[int, ...]]] = _as_set(
                    max_kernel_tuples(ctx, sv, kk, budget=budget, workers=workers)
                )
            except BudgetExceeded as exc:
                logger.warning("tabla %d s=%d k=%d omitida: %s", table, sv, kk, exc.detail)
                expected = None
            union: set[tuple[int, ...]] = set()
            for tid in (t for t in rows if t.s == sv and t.k == kk):
                found = table_solutions(ctx, tid, budget)
                mask = max_kernel_mask(ctx, sv, ctx.GF(found), "recursion") if found.shape[0] else np.array([], dtype=bool)
                sols = _as_set(found)
                row_results.append(RowResult(tid, len(sols), bool(np.all(mask))))
                union |= sols
            if expected is None:
                degrees.append(DegreeResult(s=sv, k=kk, max_kernel=-1, union=len(union), equal=False, skipped=True))
                continue
            degrees.append(
                DegreeResult(
                    s=sv,
                    k=kk,
                    max_kernel=len(expected),
                    union=len(union),
                    equal=union == expected,
                    missing=sorted(expected - union)[:10],
                    extra=sorted(union - expected)[:10],
                )
            )
            logger.info("tabla %d s=%d k=%d: %d con núcleo máximo, %d por filas", table, sv, kk, len(expected), len(union))
    return TableVerification(table=table, field=ctx.spec, rows=row_results, degrees=degrees)


def adjoint_map(polys: Sequence[LinearizedPoly]) -> list[LinearizedPoly]:
    """Imagen por la adjunta, normalizada a principal -1 (q^s -> q^{n-s})."""
    from linpoly import adjoint

    return [normalize(adjoint(f)) for f in polys]


# --- sistemas de apéndice -------------------------------------------------


def _a1(ops: _Ops, a: list[FieldElem]) -> dict[str, np.ndarray]:
    a0, a1 = a
    P, N = ops.P, ops.N
    norm = _eq(N(a0), 1)
    sigma = _eq(a0 * (P(a0, 2) + P(a1, 2, 1)), 1) & _eq(a1, -P(a0, 1, 0) * P(a1, 2))
    star_eq = _eq(P(a1, 1, 0), P(a0, 2, 1, 0) - P(a0, 1))
    return {
        "sigma": sigma,
        "sigma_prime": norm & sigma,
        "sigma_prime_rewritten": norm & _eq(P(a1, 2) * P(a0, 1, 0), -a1) & star_eq,
        "sigma_star": norm & star_eq,
    }


def _a2(ops: _Ops, a: list[FieldElem]) -> dict[str, np.ndarray]:
    a0, a1, a2 = a
    P, N = ops.P, ops.N
    norm = _eq(N(a0), 1)
    eq_a1 = _eq(a1, -P(a0, 1, 0) * P(a2, 2))
    sigma = (
        _eq(a0 * (P(a1, 2) + P(a2, 2, 1)), 1)
        & eq_a1
        & _eq(a2, -P(a0, 2, 0) - P(a2, 2) * P(a1, 1) * a0)
    )
    closing = _eq(-P(a0, 3, 2, 0) * P(a2, 4) + P(a2, 2, 1) * a0, 1)
    return {
        "sigma": sigma,
        "sigma_prime": norm & sigma,
        "sigma_prime_rewritten": norm
        & eq_a1
        & closing
        & _eq(a2, -P(a0, 2, 0) + P(a2, 3, 2) * P(a0, 2, 1, 0)),
        "sigma_star": norm & eq_a1 & closing,
    }


def _a3(ops: _Ops, a: list[FieldElem]) -> dict[str, np.ndarray]:
    a0, a1 = a
    P, N = ops.P, ops.N
    inner = P(a0, 3) + P(a1, 3, 2)
    y = P(a0, 2) * P(a1, 3) + P(a1, 1) * inner
    q0 = a0 * y
    q1 = P(a0, 1) * inner + a1 * y
    norm = _eq(N(a0), ops.const(-1))
    star_eq = _eq(P(a1, 1, 0) + P(a0, 1), P(a1, 3) * P(a0, 2, 1, 0))
    return {
        "sigma": _eq(q0, 1) & _eq(q1, 0),
        "sigma_prime": norm & _eq(q0, 1) & _eq(P(a0, 1, 0) * inner + a1, 0),
        "sigma_prime_rewritten": norm & star_eq & _eq(a1 * N(a0), -a1),
        "sigma_star": norm & star_eq,
    }


def _a4(ops: _Ops, a: list[FieldElem]) -> dict[str, np.ndarray]:
    a0, a1 = a
    P, N = ops.P, ops.N
    inner = P(a0, 4) + P(a1, 4, 3)
    w = _a4_w(ops, a0, a1)
    q0 = a0 * (P(a0, 2) * inner + P(a1, 1) * w)
    q1 = P(a0, 2) * a1 * inner + (P(a1, 1, 0) + P(a0, 1)) * w
    norm = _eq(N(a0), 1)
    w_eq = _eq(w * P(a0, 1, 0), -a1)
    base = P(a0, 1) + P(a1, 1, 0)
    return {
        "sigma": _eq(q0, 1) & _eq(q1, 0),
        "sigma_prime": norm & _eq(q0, 1) & w_eq,
        "sigma_star": norm & _eq(frobenius_q(ops.ctx, base, 3 * ops.s), P(a0, 5, 4, 3) * base) & w_eq,
    }


def _a5(ops: _Ops, a: list[FieldElem]) -> dict[str, np.ndarray]:
    a0, a1, a2 = a
    P, N = ops.P, ops.N
    x = P(a1, 2) + P(a2, 2, 1)
    q0 = a0 * x
    q1 = P(a0, 1) * P(a2, 2) + a1 * x
    q2 = P(a0, 2) + P(a2, 2) * P(a1, 1) + a2 * x
    q2s = P(q2, 1)
    norm = _eq(N(a0), 1)
    y = P(a1, 3) + P(a2, 3, 2)
    return {
        "sigma": _eq(a0 * q2s, 1) & _eq(P(q0, 1) + a1 * q2s, 0) & _eq(P(q1, 1) + a2 * q2s, 0),
        "sigma_prime": norm
        & _eq(a0 * (P(a0, 3) + P(a2, 3) * P(a1, 2) + P(a2, 1) * y), 1)
        & _eq(y * P(a0, 1, 0), -a1)
        & _eq(a2 + P(a2, 3) * P(a0, 2, 0) + a0 * P(a1, 1) * y, 0),
        "sigma_star": _general_n6_k3(ops, a),
    }


def _a6(ops: _Ops, a: list[FieldElem]) -> dict[str, np.ndarray]:
    a0, a1, a2, a3 = a
    P, N = ops.P, ops.N
    x = P(a2, 2) + P(a3, 2, 1)
    norm = _eq(N(a0), 1)
    sigma = (
        _eq(a0 * x, 1)
        & _eq(P(a0, 1) * P(a3, 2) + a1 * x, 0)
        & _eq(P(a0, 2) + P(a3, 2) * P(a1, 1) + a2 * x, 0)
        & _eq(P(a1, 2) + P(a3, 2) * P(a2, 1) + a3 * x, 0)
    )
    rewritten = (
        norm
        & _eq(a0 * x, 1)
        & _eq(a1, -P(a0, 1, 0) * P(a3, 2))
        & _eq(a2, -P(a0, 2, 0) - P(a3, 2) * P(a1, 1) * a0)
        & _eq(a3, -P(a1, 2) * a0 - P(a3, 2) * P(a2, 1) * a0)
    )
    star = (
        norm
        & _eq(a0 * (-P(a0, 4, 2) + P(a3, 5, 4) * P(a0, 4, 3, 2) + P(a3, 2, 1)), 1)
        & _eq(a1, -P(a0, 1, 0) * P(a3, 2))
        & _eq(a2, -P(a0, 2, 0) + P(a3, 3, 2) * P(a0, 2, 1, 0))
        & _eq(a3, P(a3, 4) * P(a0, 3, 2, 0) + P(a3, 2) * P(a0, 3, 1, 0) - P(a0, 3, 2, 1, 0) * P(a3, 4, 3, 2))
    )
    return {"sigma": sigma, "sigma_prime": norm & sigma, "sigma_prime_rewritten": rewritten, "sigma_star": star}


@dataclass(frozen=True)
class AppendixSystem:
    label: str
    n: int
    k: int
    s_values: tuple[int, ...]
    stages: Callable[[_Ops, list[FieldElem]], dict[str, np.ndarray]]


APPENDIX_STAGES: dict[str, AppendixSystem] = {
    "A1": AppendixSystem("A1", 4, 2, (1,), _a1),
    "A2": AppendixSystem("A2", 5, 3, (1, 2), _a2),
    "A3": AppendixSystem("A3", 5, 2, (1, 2), _a3),
    "A4": AppendixSystem("A4", 6, 2, (1,), _a4),
    "A5": AppendixSystem("A5", 6, 3, (1,), _a5),
    "A6": AppendixSystem("A6", 6, 4, (1,), _a6),
}


def _appendix_candidates(ctx: FieldCtx, system: AppendixSystem, s: int, budget: int) -> np.ndarray:
    if system.label == "A6":
        # cada etapa contiene a_0 X = 1 y las ecuaciones que fijan a_1 y a_2 desde (a_0, a_3)
        return _seed_candidates_n6_k4(ctx, s)
    _check_budget(ctx.order**system.k, budget)
    return _product_rows(ctx.order, system.k, 0, ctx.order**system.k)


def appendix_solution_sets(ctx: FieldCtx, s: int, label: str, budget: Optional[int] = None) -> dict[str, set[tuple[int, ...]]]:
    system = APPENDIX_STAGES.get(label)
    if system is None:
        raise PreconditionError(f"sistema desconocido: {label}")
    if ctx.n != system.n or s not in system.s_values:
        raise PreconditionError(f"{label} es para n={system.n}, s en {system.s_values}")
    budget = DEFAULT_BUDGET if budget is None else budget
    candidates = _appendix_candidates(ctx, system, s, budget)
    ops = _Ops(ctx, s)
    found: dict[str, list[np.ndarray]] = {}
    for start in range(0, candidates.shape[0], CHUNK):
        block = candidates[start : start + CHUNK]
        for stage, mask in system.stages(ops, _field_arrays(ctx, block)).items():
            found.setdefault(stage, []).append(block[mask])
    return {stage: _as_set(np.concatenate(parts)) for stage, parts in found.items()}


def appendix_equivalent(ctx: FieldCtx, s: int, label: str, budget: Optional[int] = None) -> bool:
    sets = appendix_solution_sets(ctx, s, label, budget)
    first = next(iter(sets.values()))
    return all(other == first for other in sets.values())


__all__ = [
    "gaussian_binomial",
    "admissible_t",
    "trace_family",
    "trace_row_condition",
    "binomial_has_max_kernel",
    "DegreeN2Seed",
    "derive_n2_batch",
    "derive_degree_n_minus_2",
    "newrelt_check",
    "trace2_classify",
    "TableID",
    "table_rows",
    "table_mask",
    "table_condition",
    "table_solutions",
    "max_kernel_tuples",
    "tuples_to_polys",
    "enumerate_max_kernel",
    "RowResult",
    "DegreeResult",
    "TableVerification",
    "field_for_table",
    "verify_table",
    "adjoint_map",
    "AppendixSystem",
    "APPENDIX_STAGES",
    "appendix_solution_sets",
    "appendix_equivalent",
]
