"""
Códigos de rango métrico generados por q^s-polinomios.

Un código es el F_{q^n}-espacio generado por polinomios; la distancia de rango de
una palabra f es n - dim ker f. El código de Gabidulin G_{k,s} es el generado por
x, x^sigma, ..., x^{sigma^{k-1}}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

import numpy as np

from errors import BudgetExceeded, PreconditionError
from gf import FieldCtx, check_same
from linpoly import LinearizedPoly, kernel_dimensions_batch
from settings import DEFAULT_BUDGET


logger = logging.getLogger("maxker.mrd")

CHUNK = 2**12


@dataclass(frozen=True)
class LinearCode:
    ctx: FieldCtx
    s: int
    generators: tuple[LinearizedPoly, ...]

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def size(self) -> int:
        return self.ctx.order**self.k


@dataclass
class MRDReport:
    is_mrd: bool
    max_kernel_dim: int
    min_rank: int
    worst: Optional[str]
    codewords_checked: int
    degree_bound_holds: bool = True


def gabidulin_code(ctx: FieldCtx, k: int, s: int = 1) -> LinearCode:
    if gcd(s, ctx.n) != 1:
        raise PreconditionError(f"gcd(s={s}, n={ctx.n}) != 1")
    if not 1 <= k <= ctx.n:
        raise PreconditionError(f"k={k} fuera de [1, n={ctx.n}]")
    gens = tuple(LinearizedPoly.monomial(ctx, s, j) for j in range(k))
    return LinearCode(ctx, s, gens)


def code_from_polys(polys: Sequence[LinearizedPoly]) -> LinearCode:
    if not polys:
        raise PreconditionError("el código necesita al menos un generador")
    ctx = check_same(*(f.ctx for f in polys))
    s = polys[0].s
    if any(f.s != s for f in polys):
        raise PreconditionError("todos los generadores deben compartir s")
    return LinearCode(ctx, s, tuple(polys))


def _combinations(Q: int, width: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    rows = np.empty((idx.size, width), dtype=np.int64)
    for j in range(width - 1, -1, -1):
        rows[:, j] = idx % Q
        idx //= Q
    return rows


def verify_mrd(code: LinearCode, budget: Optional[int] = None) -> MRDReport:
    """Recorre todas las palabras no nulas y calcula la mínima distancia de rango."""
    ctx = code.ctx
    n = ctx.n
    budget = DEFAULT_BUDGET if budget is None else budget
    if code.size > budget:
        raise BudgetExceeded(code.size, budget)
    gens = ctx.GF(np.array([f.grid for f in code.generators], dtype=np.int64))
    sigma_perm = np.array([(code.s * j) % n for j in range(n)])

    max_dim = -1
    worst_grid: Optional[np.ndarray] = None
    degree_ok = True
    checked = 0
    for start in range(1, code.size, CHUNK):
        stop = min(code.size, start + CHUNK)
        combos = ctx.GF(_combinations(ctx.order, code.k, start, stop))
        grids = combos @ gens
        dims = kernel_dimensions_batch(ctx, 1, grids)
        sigma_view = grids.view(np.ndarray)[:, sigma_perm]
        nonzero = sigma_view != 0
        degrees = np.where(nonzero.any(axis=1), n - 1 - np.argmax(nonzero[:, ::-1], axis=1), -1)
        degree_ok = degree_ok and bool(np.all(dims <= degrees))
        checked += stop - start
        top = int(np.argmax(dims))
        if dims[top] > max_dim:
            max_dim = int(dims[top])
            worst_grid = grids[top].view(np.ndarray).copy()
        logger.debug("MRD: %d/%d palabras", checked, code.size - 1)

    worst = None
    if worst_grid is not None:
        worst = str(LinearizedPoly(ctx, code.s, tuple(int(v) for v in worst_grid)))
    max_dim = max(max_dim, 0)
    report = MRDReport(
        is_mrd=degree_ok and max_dim <= code.k - 1,
        max_kernel_dim=max_dim,
        min_rank=n - max_dim,
        worst=worst,
        codewords_checked=checked,
        degree_bound_holds=degree_ok,
    )
    logger.info("MRD %s k=%d s=%d: dim máx %d, rango mín %d", ctx.spec, code.k, code.s, max_dim, report.min_rank)
    return report


__all__ = ["LinearCode", "MRDReport", "gabidulin_code", "code_from_polys", "verify_mrd"]
