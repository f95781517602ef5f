"""
q^s-polinomios linealizados sobre F_{q^n}.

Modelos:
- LinearizedPoly(ctx, s, grid): grid[i] es el coeficiente de x^{q^i} (rejilla q^1 de largo n);
  la vista sigma (s, k) se obtiene con a_j = grid[(s*j) % n]
- SubspaceBasis(ctx, elems): base F_q-independiente (elementos o vectores de F_{q^n}^k)

APIs:
- evaluate, kernel_basis, kernel_dimension, rank, count_roots
- adjoint, compose_mod, annihilator
- normalize, strip, scale, add
- fq_matrix, dickson_matrix, kernel_dimensions_batch
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence, Union

import galois
import numpy as np

from errors import DependentBasisError, FieldMismatchError, PreconditionError
from gf import (
    FieldCtx,
    FieldElem,
    check_same,
    decode,
    fq_coordinates,
    from_fq_coordinates,
    frobenius_q,
    random_elements,
)


logger = logging.getLogger("maxker.linpoly")

CoeffsLike = Union[Sequence[int], FieldElem]


def _normalize_s(s: int, n: int) -> int:
    return s % n or 1


@dataclass(frozen=True, eq=False)
class LinearizedPoly:
    ctx: FieldCtx
    s: int
    grid: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.ctx.n
        if gcd(self.s, n) != 1:
            raise PreconditionError(f"gcd(s={self.s}, n={n}) != 1")
        object.__setattr__(self, "s", _normalize_s(self.s, n))
        if len(self.grid) != n:
            raise PreconditionError(f"la rejilla debe tener {n} entradas")
        object.__setattr__(self, "grid", tuple(int(c) for c in self.grid))

    @property
    def key(self) -> tuple:
        return (self.ctx.key, self.s, self.grid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearizedPoly):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def grid_array(self) -> FieldElem:
        return self.ctx.GF(list(self.grid))

    def sigma_index(self, j: int) -> int:
        return (self.s * j) % self.ctx.n

    @property
    def sigma_grid(self) -> tuple[int, ...]:
        return tuple(self.grid[self.sigma_index(j)] for j in range(self.ctx.n))

    @property
    def degree(self) -> int:
        sg = self.sigma_grid
        for j in range(len(sg) - 1, -1, -1):
            if sg[j]:
                return j
        return -1

    @property
    def k(self) -> int:
        return self.degree

    @property
    def coeffs(self) -> tuple[int, ...]:
        """(a_0, ..., a_k) como enteros; (0,) para el polinomio nulo."""
        k = self.degree
        return self.sigma_grid[: k + 1] if k >= 0 else (0,)

    def coeff(self, j: int) -> FieldElem:
        return self.ctx.GF(self.sigma_grid[j] if 0 <= j < self.ctx.n else 0)

    @property
    def is_zero(self) -> bool:
        return not any(self.grid)

    @classmethod
    def from_coeffs(cls, ctx: FieldCtx, s: int, coeffs: CoeffsLike) -> "LinearizedPoly":
        values = ctx.GF(np.asarray([int(c) for c in np.ravel(coeffs)], dtype=np.int64))
        grid = ctx.GF.Zeros(ctx.n)
        for j, c in enumerate(values):
            grid[(s * j) % ctx.n] += c
        return cls(ctx, s, tuple(int(c) for c in grid))

    @classmethod
    def zero(cls, ctx: FieldCtx, s: int = 1) -> "LinearizedPoly":
        return cls(ctx, s, (0,) * ctx.n)

    @classmethod
    def monomial(cls, ctx: FieldCtx, s: int, j: int, c: int = 1) -> "LinearizedPoly":
        return cls.from_coeffs(ctx, s, [0] * j + [int(c)])

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "LinearizedPoly":
        return cls.monomial(ctx, 1, 0)

    def __str__(self) -> str:
        return f"s={self.s};a=[{','.join(str(c) for c in self.coeffs)}]"


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    ctx: FieldCtx
    elems: FieldElem

    @property
    def dim(self) -> int:
        return int(self.elems.shape[0])

    def as_ints(self) -> list:
        return self.elems.view(np.ndarray).astype(np.int64).tolist()

    def fq_matrix(self) -> FieldElem:
        """Filas: coordenadas F_q de cada vector (aplanadas si son vectores de F_{q^n}^k)."""
        if self.dim == 0:
            return self.ctx.GF.Zeros((0, self.ctx.n))
        coords = fq_coordinates(self.ctx, self.elems)
        return coords.reshape(self.dim, -1)

    def is_independent(self) -> bool:
        if self.dim == 0:
            return True
        return int(np.linalg.matrix_rank(self.fq_matrix())) == self.dim


def _as_field(ctx: FieldCtx, z) -> FieldElem:
    if isinstance(z, galois.FieldArray):
        if type(z) is not ctx.GF:
            raise FieldMismatchError(f"elemento de {type(z).name}, se esperaba {ctx.GF.name}")
        return z
    if isinstance(z, (int, np.integer)):
        return decode(ctx, int(z))
    return ctx.GF(z)


def evaluate(f: LinearizedPoly, z) -> FieldElem:
    ctx = f.ctx
    z = _as_field(ctx, z)
    result = ctx.GF.Zeros(z.shape)
    for i, c in enumerate(f.grid):
        if c:
            result = result + ctx.GF(c) * frobenius_q(ctx, z, i)
    return result


def fq_matrix(f: LinearizedPoly) -> FieldElem:
    """Matriz n x n sobre F_q de z -> f(z) en la base 1, gamma, ..., gamma^{n-1}."""
    ctx = f.ctx
    basis = ctx.GF(ctx.gamma) ** np.arange(ctx.n, dtype=np.int64)
    images = evaluate(f, basis)
    return fq_coordinates(ctx, images).T


def dickson_matrix(f: LinearizedPoly) -> FieldElem:
    ctx = f.ctx
    n = ctx.n
    grid = f.grid_array
    rows = [frobenius_q(ctx, grid[(np.arange(n) - i) % n], i) for i in range(n)]
    return ctx.GF(np.stack([r.view(np.ndarray) for r in rows]))


def kernel_dimension(f: LinearizedPoly) -> int:
    return f.ctx.n - int(np.linalg.matrix_rank(fq_matrix(f)))


def rank(f: LinearizedPoly) -> int:
    return int(np.linalg.matrix_rank(fq_matrix(f)))


def _rref_null_space(ctx: FieldCtx, matrix: FieldElem) -> FieldElem:
    null = matrix.null_space()
    if null.shape[0] == 0:
        return null
    return null.row_reduce()


def kernel_basis(f: LinearizedPoly) -> SubspaceBasis:
    ctx = f.ctx
    rref = _rref_null_space(ctx, fq_matrix(f))
    if rref.shape[0] == 0:
        return SubspaceBasis(ctx, ctx.GF.Zeros(0))
    return SubspaceBasis(ctx, from_fq_coordinates(ctx, rref))


@lru_cache(maxsize=64)
def _frobenius_table(ctx: FieldCtx, i: int) -> FieldElem:
    return frobenius_q(ctx, ctx.GF.elements, i)


def count_roots(f: LinearizedPoly) -> int:
    ctx = f.ctx
    if ctx.order > 2**16:
        return ctx.q ** kernel_dimension(f)
    values = ctx.GF.Zeros(ctx.order)
    for i, c in enumerate(f.grid):
        if c:
            values = values + ctx.GF(c) * _frobenius_table(ctx, i)
    return int(np.count_nonzero(values == 0))


def root_counts_to_dims(ctx: FieldCtx, counts: np.ndarray) -> np.ndarray:
    dims = np.full(counts.shape, -1, dtype=np.int64)
    for d in range(ctx.n + 1):
        dims[counts == ctx.q**d] = d
    return dims


def kernel_dimensions_batch(ctx: FieldCtx, s: int, coeffs: FieldElem, chunk: Optional[int] = None) -> np.ndarray:
    """Dimensiones de núcleo de muchos q^s-polinomios por conteo de raíces.

    `coeffs` tiene forma (N, K): fila r = coeficientes sigma (a_0, ..., a_{K-1}).
    """
    coeffs = ctx.GF(coeffs)
    total, width = coeffs.shape
    chunk = chunk or max(1, 2**22 // ctx.order)
    tables = [_frobenius_table(ctx, (s * j) % ctx.n) for j in range(width)]
    counts = np.empty(total, dtype=np.int64)
    for start in range(0, total, chunk):
        block = coeffs[start : start + chunk]
        values = block[:, 0, None] * tables[0][None, :]
        for j in range(1, width):
            values = values + block[:, j, None] * tables[j][None, :]
        counts[start : start + chunk] = np.count_nonzero(values == 0, axis=1)
    return root_counts_to_dims(ctx, counts)


def scale(f: LinearizedPoly, c) -> LinearizedPoly:
    c = _as_field(f.ctx, c)
    grid = f.grid_array * c
    return LinearizedPoly(f.ctx, f.s, tuple(int(v) for v in grid))


def add(f: LinearizedPoly, g: LinearizedPoly) -> LinearizedPoly:
    ctx = check_same(f.ctx, g.ctx)
    grid = f.grid_array + g.grid_array
    return LinearizedPoly(ctx, f.s if f.s == g.s else 1, tuple(int(v) for v in grid))


def normalize(f: LinearizedPoly) -> LinearizedPoly:
    """Reescala para que el coeficiente sigma principal sea -1."""
    if f.is_zero:
        raise PreconditionError("el polinomio nulo no se puede normalizar")
    lead = f.coeff(f.degree)
    return scale(f, -(lead**-1))


def strip(f: LinearizedPoly) -> tuple[LinearizedPoly, int]:
    """Si a_0 = ... = a_{j-1} = 0, devuelve g con g^{sigma^j} = f (mismo núcleo) y j."""
    if f.is_zero:
        raise PreconditionError("el polinomio nulo no tiene forma reducida")
    sg = f.sigma_grid
    j = next(i for i, c in enumerate(sg) if c)
    if j == 0:
        return f, 0
    ctx = f.ctx
    back = (-f.s * j) % ctx.n
    k = f.degree
    shifted = [frobenius_q(ctx, ctx.GF(sg[i + j]), back) for i in range(k - j + 1)]
    return LinearizedPoly.from_coeffs(ctx, f.s, [int(c) for c in shifted]), j


def adjoint(f: LinearizedPoly) -> LinearizedPoly:
    ctx = f.ctx
    n = ctx.n
    grid = [0] * n
    for i, c in enumerate(f.grid):
        if c:
            target = (n - i) % n
            grid[target] = int(frobenius_q(ctx, ctx.GF(c), target))
    return LinearizedPoly(ctx, _normalize_s(n - f.s, n), tuple(grid))


def compose_mod(f: LinearizedPoly, g: LinearizedPoly) -> LinearizedPoly:
    """f(g(x)) mod x^{q^n} - x."""
    ctx = check_same(f.ctx, g.ctx)
    n = ctx.n
    grid = ctx.GF.Zeros(n)
    g_arr = g.grid_array
    for i, a in enumerate(f.grid):
        if not a:
            continue
        twisted = ctx.GF(a) * frobenius_q(ctx, g_arr, i)
        grid = grid + twisted[(np.arange(n) - i) % n]
    return LinearizedPoly(ctx, f.s if f.s == g.s else 1, tuple(int(v) for v in grid))


def annihilator(U: SubspaceBasis) -> LinearizedPoly:
    """q-polinomio mónico (principal -1) de q-grado k cuyo núcleo es <U>_{F_q}."""
    ctx = U.ctx
    k = U.dim
    if U.elems.ndim != 1:
        raise PreconditionError("la base debe estar formada por elementos de F_{q^n}")
    if k > ctx.n - 1:
        raise PreconditionError(f"dim U = {k} supera n - 1 = {ctx.n - 1}")
    if k == 0:
        return LinearizedPoly.from_coeffs(ctx, 1, [int(-ctx.one)])
    moore = ctx.GF(
        np.stack([frobenius_q(ctx, U.elems, j).view(np.ndarray) for j in range(k + 1)], axis=1)
    )
    coeffs = ctx.GF.Zeros(k + 1)
    for j in range(k + 1):
        minor = np.delete(moore.view(np.ndarray), j, axis=1)
        det = np.linalg.det(ctx.GF(minor))
        coeffs[j] = det if j % 2 == 0 else -det
    if coeffs[k] == 0:
        raise DependentBasisError("los elementos de U son F_q-dependientes")
    coeffs = coeffs * (-(coeffs[k] ** -1))
    return LinearizedPoly.from_coeffs(ctx, 1, [int(c) for c in coeffs])


def random_poly(
    ctx: FieldCtx,
    s: int,
    k: int,
    rng: np.random.Generator,
    monic: bool = True,
    nonzero_a0: bool = True,
) -> LinearizedPoly:
    body = random_elements(ctx, rng, k)
    if nonzero_a0 and k > 0:
        body[0] = random_elements(ctx, rng, 1, nonzero=True)[0]
    lead = -ctx.one if monic else random_elements(ctx, rng, 1, nonzero=True)[0]
    if k == 0 and nonzero_a0:
        return LinearizedPoly.from_coeffs(ctx, s, [int(lead)])
    return LinearizedPoly.from_coeffs(ctx, s, [int(c) for c in body] + [int(lead)])


def from_sigma_coeffs(ctx: FieldCtx, s: int, coeffs: CoeffsLike) -> LinearizedPoly:
    return LinearizedPoly.from_coeffs(ctx, s, coeffs)


def sigma_coeffs(f: LinearizedPoly) -> tuple[int, ...]:
    return f.coeffs


def sigma_coeff_arrays(polys: Iterable[LinearizedPoly], width: int) -> np.ndarray:
    return np.array([list(p.sigma_grid[:width]) for p in polys], dtype=np.int64)


__all__ = [
    "LinearizedPoly",
    "SubspaceBasis",
    "evaluate",
    "fq_matrix",
    "dickson_matrix",
    "kernel_dimension",
    "kernel_basis",
    "rank",
    "count_roots",
    "root_counts_to_dims",
    "kernel_dimensions_batch",
    "scale",
    "add",
    "normalize",
    "strip",
    "adjoint",
    "compose_mod",
    "annihilator",
    "random_poly",
    "from_sigma_coeffs",
    "sigma_coeffs",
    "sigma_coeff_arrays",
]
