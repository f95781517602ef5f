"""
Criterios de núcleo máximo para q^s-polinomios.

Para f = a_0 x + ... + a_{k-1} x^{sigma^{k-1}} - x^{sigma^k} (sigma = q^s) con matriz
compañera A, f tiene núcleo de dimensión k si y solo si A A^sigma ... A^{sigma^{n-1}} = I_k.

APIs:
- companion, semilinear_product, q_sequence, q_states
- is_maximum_kernel(f, method): matrix | e0 | recursion | oracle
- max_kernel_mask: misma prueba vectorizada sobre lotes de coeficientes
- norm_necessary, fixed_space, matrix_order
- splitting_field_degree, count_roots_in_extension, transfer_check
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional, Sequence

import numpy as np

from errors import (
    FieldMismatchError,
    OrderCapExceeded,
    PreconditionError,
    SemilinearOrderError,
)
from gf import FieldCtx, FieldElem, fq_coordinates, frobenius_q, in_subfield, make_field, norm_to, embed
from linpoly import (
    LinearizedPoly,
    SubspaceBasis,
    kernel_dimension,
    kernel_dimensions_batch,
    normalize,
    strip,
)
from settings import DEFAULT_EXTENSION_CAP, DEFAULT_ORDER_CAP


logger = logging.getLogger("maxker.maxkernel")

METHODS = ("matrix", "e0", "recursion", "oracle")


@dataclass(frozen=True, eq=False)
class CompanionMatrix:
    ctx: FieldCtx
    s: int
    coeffs: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @property
    def matrix(self) -> FieldElem:
        k = self.k
        A = self.ctx.GF.Zeros((k, k))
        for i in range(1, k):
            A[i, i - 1] = 1
        if k:
            A[:, k - 1] = self.ctx.GF(list(self.coeffs))
        return A

    @property
    def invertible(self) -> bool:
        return bool(self.k == 0 or self.coeffs[0] != 0)


@dataclass(frozen=True)
class QState:
    s: int
    step: int
    values: tuple[int, ...]


def companion(f: LinearizedPoly) -> CompanionMatrix:
    """Matriz compañera de la forma mónica (principal -1) de f, tras quitar potencias sigma."""
    g, j = strip(normalize(f))
    if j:
        logger.debug("a_0 = 0: se reduce %s a %s (j=%d)", f, g, j)
    return CompanionMatrix(g.ctx, g.s, g.coeffs[: g.degree])


def semilinear_product(A: CompanionMatrix, s: Optional[int] = None) -> FieldElem:
    """B = A A^sigma ... A^{sigma^{n-1}} con sigma = q^s."""
    ctx = A.ctx
    s = A.s if s is None else s
    if gcd(s, ctx.n) != 1:
        raise PreconditionError(f"gcd(s={s}, n={ctx.n}) != 1")
    M = A.matrix
    B = M.copy()
    for i in range(1, ctx.n):
        B = B @ frobenius_q(ctx, M, s * i)
    return B


def _frobenius_cols(ctx: FieldCtx, s: int, a: Sequence[FieldElem]) -> list[list[FieldElem]]:
    # cols[i][l] = a_l^{sigma^i}
    return [[frobenius_q(ctx, a_l, s * i) for a_l in a] for i in range(ctx.n)]


def _batch_product_is_identity(ctx: FieldCtx, s: int, a: Sequence[FieldElem]) -> np.ndarray:
    k = len(a)
    GF = ctx.GF
    shape = a[0].shape
    powers = _frobenius_cols(ctx, s, a)
    # P = A, luego P <- P A^{sigma^i}: desplaza columnas y recalcula la última
    P = [[GF.Zeros(shape) for _ in range(k)] for _ in range(k)]
    for r in range(1, k):
        P[r][r - 1] = GF.Ones(shape)
    for r in range(k):
        P[r][k - 1] = a[r]
    for i in range(1, ctx.n):
        col = [sum((P[r][l] * powers[i][l] for l in range(1, k)), P[r][0] * powers[i][0]) for r in range(k)]
        P = [P[r][1:] + [col[r]] for r in range(k)]
    ok = np.ones(shape, dtype=bool)
    for r in range(k):
        for c in range(k):
            ok &= np.asarray(P[r][c] == (1 if r == c else 0))
    return ok


def _batch_e0_image(ctx: FieldCtx, s: int, a: Sequence[FieldElem]) -> list[FieldElem]:
    k = len(a)
    GF = ctx.GF
    shape = a[0].shape
    powers = _frobenius_cols(ctx, s, a)
    v = [GF.Ones(shape)] + [GF.Zeros(shape) for _ in range(k - 1)]
    for i in range(ctx.n - 1, -1, -1):
        last = v[k - 1]
        v = [powers[i][0] * last] + [v[r - 1] + powers[i][r] * last for r in range(1, k)]
    return v


def _q_recursion(ctx: FieldCtx, s: int, a: Sequence[FieldElem]) -> Iterator[list[FieldElem]]:
    k = len(a)
    GF = ctx.GF
    shape = a[0].shape
    Q = [GF.Ones(shape)] + [GF.Zeros(shape) for _ in range(k - 1)]
    yield Q
    for _ in range(ctx.n):
        Qs = [frobenius_q(ctx, v, s) for v in Q]
        Q = [a[0] * Qs[k - 1]] + [Qs[j - 1] + a[j] * Qs[k - 1] for j in range(1, k)]
        yield Q


def _is_e0(values: Sequence[FieldElem]) -> np.ndarray:
    ok = np.asarray(values[0] == 1)
    for v in values[1:]:
        ok = ok & np.asarray(v == 0)
    return ok


def q_states(f: LinearizedPoly) -> Iterator[QState]:
    g = normalize(f)
    a = [g.coeff(j) for j in range(g.degree)]
    if not a:
        return
    for i, Q in enumerate(_q_recursion(g.ctx, g.s, a)):
        yield QState(s=g.s, step=i, values=tuple(int(v) for v in Q))


def q_sequence(f: LinearizedPoly) -> FieldElem:
    """(Q_{0,n}, ..., Q_{k-1,n}): la imagen de e_0 por tau^n."""
    g = normalize(f)
    last = None
    for state in q_states(g):
        last = state
    if last is None:
        return g.ctx.GF.Zeros(0)
    return g.ctx.GF(list(last.values))


def max_kernel_mask(ctx: FieldCtx, s: int, coeffs: FieldElem, method: str = "recursion") -> np.ndarray:
    """Para cada fila (a_0, ..., a_{k-1}) de `coeffs` decide si a_0 x + ... - x^{sigma^k} tiene núcleo máximo."""
    coeffs = ctx.GF(coeffs)
    total, k = coeffs.shape
    if k == 0:
        return np.ones(total, dtype=bool)
    if method == "oracle":
        lead = -ctx.GF.Ones((total, 1))
        full = np.concatenate([coeffs, lead], axis=1)
        return kernel_dimensions_batch(ctx, s, ctx.GF(full)) == k
    a = [coeffs[:, j] for j in range(k)]
    if method == "matrix":
        ok = _batch_product_is_identity(ctx, s, a)
    elif method == "e0":
        ok = _is_e0(_batch_e0_image(ctx, s, a))
    elif method == "recursion":
        *_, last = _q_recursion(ctx, s, a)
        ok = _is_e0(last)
    else:
        raise PreconditionError(f"método desconocido: {method}")
    return ok & np.asarray(a[0] != 0)


def _identity(ctx: FieldCtx, k: int) -> FieldElem:
    return ctx.GF.Identity(k)


def is_maximum_kernel(f: LinearizedPoly, method: str = "matrix") -> bool:
    if method not in METHODS:
        raise PreconditionError(f"método desconocido: {method}")
    if f.is_zero:
        raise PreconditionError("el polinomio nulo no tiene sigma-grado")
    g = normalize(f)
    k = g.degree
    if k == 0:
        return True
    if method == "oracle":
        return kernel_dimension(g) == k
    if g.coeff(0) == 0:
        # tras quitar potencias sigma el grado baja de k
        return False
    A = companion(g)
    if method == "matrix":
        return bool(np.array_equal(semilinear_product(A, g.s), _identity(g.ctx, k)))
    a = [g.coeff(j) for j in range(k)]
    if method == "e0":
        return bool(_is_e0(_batch_e0_image(g.ctx, g.s, a)))
    return bool(_is_e0(q_sequence(g)))


@dataclass(frozen=True)
class MaxKernelReport:
    verdicts: dict
    b_is_identity: bool
    kernel_dim: int

    @property
    def max_kernel(self) -> bool:
        return self.verdicts["oracle"]


def max_kernel_report(f: LinearizedPoly) -> MaxKernelReport:
    verdicts = {m: is_maximum_kernel(f, m) for m in METHODS}
    g = normalize(f)
    b_identity = verdicts["matrix"]
    if g.degree > 0 and g.coeff(0) != 0:
        b_identity = bool(np.array_equal(semilinear_product(companion(g), g.s), _identity(g.ctx, g.degree)))
    return MaxKernelReport(verdicts=verdicts, b_is_identity=b_identity, kernel_dim=kernel_dimension(f))


def norm_necessary(f: LinearizedPoly) -> bool:
    g = normalize(f)
    ctx = g.ctx
    sign = -1 if (ctx.n * (g.degree + 1)) % 2 else 1
    return bool(norm_to(ctx, g.coeff(0), 1) == ctx.GF(sign % ctx.p))


def fixed_space(A: CompanionMatrix, s: Optional[int] = None) -> SubspaceBasis:
    """Puntos fijos F_q de tau(v) = A v^{q^s}; requiere B = I_k."""
    ctx = A.ctx
    s = A.s if s is None else s
    k, n = A.k, ctx.n
    if not A.invertible:
        raise PreconditionError("A no es invertible (a_0 = 0)")
    B = semilinear_product(A, s)
    if not np.array_equal(B, _identity(ctx, k)):
        raise SemilinearOrderError("tau no tiene orden n: B != I_k")
    M = A.matrix
    gamma_pows = ctx.GF(ctx.gamma) ** np.arange(n, dtype=np.int64)
    columns = []
    for l in range(k):
        for i in range(n):
            image = M[:, l] * frobenius_q(ctx, gamma_pows[i], s)
            image[l] = image[l] - gamma_pows[i]
            columns.append(fq_coordinates(ctx, image).reshape(-1))
    system = ctx.GF(np.stack([c.view(np.ndarray) for c in columns], axis=1))
    null = system.null_space()
    if null.shape[0] == 0:
        return SubspaceBasis(ctx, ctx.GF.Zeros((0, k)))
    rref = null.row_reduce().reshape(-1, k, n)
    vectors = np.sum(rref * gamma_pows, axis=-1)
    return SubspaceBasis(ctx, vectors)


def spans_whole_space(basis: SubspaceBasis) -> bool:
    """Los vectores fijos generan F_{q^n}^k sobre F_{q^n}."""
    elems = basis.elems
    if elems.ndim != 2 or elems.shape[0] != elems.shape[1]:
        return False
    return bool(np.linalg.det(elems) != 0)


def matrix_order(B: FieldElem, cap: int = DEFAULT_ORDER_CAP) -> int:
    k = B.shape[0]
    identity = type(B).Identity(k)
    if k and np.linalg.det(B) == 0:
        raise PreconditionError("B es singular y no tiene orden multiplicativo")
    P = B.copy()
    m = 1
    while not np.array_equal(P, identity):
        m += 1
        if m > cap:
            raise OrderCapExceeded(cap)
        P = P @ B
    return m


def splitting_field_degree(f: LinearizedPoly, order_cap: int = DEFAULT_ORDER_CAP) -> int:
    """m tal que F_{q^{nm}} es el cuerpo de descomposición de f (m = orden de B)."""
    if f.is_zero:
        raise PreconditionError("el polinomio nulo no tiene cuerpo de descomposición")
    g = normalize(f)
    if g.degree == 0:
        return 1
    if g.coeff(0) == 0:
        raise PreconditionError("se requiere a_0 != 0")
    if g.s != 1:
        logger.warning("s=%d: grado del cuerpo de descomposición calculado como extensión para s != 1", g.s)
    A = CompanionMatrix(g.ctx, g.s, g.coeffs[: g.degree])
    return matrix_order(semilinear_product(A, g.s), order_cap)


def lift_to_extension(f: LinearizedPoly, m: int, extension_cap: int = DEFAULT_EXTENSION_CAP) -> LinearizedPoly:
    """f con exponentes literales q^{s j} vista sobre F_{q^{nm}}."""
    ctx = f.ctx
    order = ctx.order**m
    if order > extension_cap:
        raise PreconditionError(f"F_{{q^{ctx.n * m}}} tiene orden {order} > {extension_cap}")
    big = make_field(ctx.p, ctx.e, ctx.n * m)
    coeffs = embed(ctx, big, ctx.GF(list(f.coeffs)))
    grid = big.GF.Zeros(big.n)
    for j, c in enumerate(coeffs):
        grid[(f.s * j) % big.n] += c
    return LinearizedPoly(big, 1, tuple(int(v) for v in grid))


def count_roots_in_extension(f: LinearizedPoly, m: int, extension_cap: int = DEFAULT_EXTENSION_CAP) -> int:
    lifted = lift_to_extension(f, m, extension_cap)
    return lifted.ctx.q ** kernel_dimension(lifted)


def _transfer_poly(ctx: FieldCtx, coeffs: Sequence[int], s: int) -> LinearizedPoly:
    return LinearizedPoly.from_coeffs(ctx, s, [int(c) for c in coeffs] + [int(-ctx.one)])


def transfer_verdicts(ctx: FieldCtx, coeffs: Sequence[int], s: int, t: int, m: int, method: str = "matrix") -> tuple[bool, bool]:
    """(f con q^s, g con q^t) sobre F_{q^{nm}} = ctx con coeficientes a_0..a_{k-1} en F_{q^m}."""
    N = ctx.n
    if m < 1 or N % m:
        raise PreconditionError(f"m={m} no divide el grado {N} del cuerpo ambiente")
    if gcd(s, N) != 1 or gcd(t, N) != 1:
        raise PreconditionError(f"se requiere gcd(s, nm) = gcd(t, nm) = 1 (s={s}, t={t}, nm={N})")
    if (s - t) % m:
        raise PreconditionError(f"s={s} y t={t} no son congruentes módulo m={m}")
    values = ctx.GF([int(c) for c in coeffs])
    if values.size and not in_subfield(ctx, values, m):
        raise FieldMismatchError(f"los coeficientes no están en F_{{q^{m}}}")
    f = _transfer_poly(ctx, coeffs, s)
    g = _transfer_poly(ctx, coeffs, t)
    return is_maximum_kernel(f, method), is_maximum_kernel(g, method)


def transfer_check(ctx: FieldCtx, coeffs: Sequence[int], s: int, t: int, m: int, method: str = "matrix") -> bool:
    f_max, g_max = transfer_verdicts(ctx, coeffs, s, t, m, method)
    return f_max == g_max


__all__ = [
    "METHODS",
    "CompanionMatrix",
    "QState",
    "MaxKernelReport",
    "companion",
    "semilinear_product",
    "q_states",
    "q_sequence",
    "max_kernel_mask",
    "is_maximum_kernel",
    "max_kernel_report",
    "norm_necessary",
    "fixed_space",
    "spans_whole_space",
    "matrix_order",
    "splitting_field_degree",
    "lift_to_extension",
    "count_roots_in_extension",
    "transfer_verdicts",
    "transfer_check",
]
