"""
Cuerpos finitos F_{q^n} con q = p^e sobre galois.

APIs:
- make_field(p, e, n, modulus=None): construye un FieldCtx
- frobenius_q, norm_to, trace_to: Frobenius relativo, norma y traza a F_{q^m}
- fq_coordinates: coordenadas sobre F_q en la base 1, gamma, ..., gamma^{n-1}
- subfield_elements, in_subfield, embed: subcuerpos y encajes entre cuerpos
- encode/decode: codificación entera (dígitos base p, little-endian)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import galois
import numpy as np

from errors import FieldMismatchError, FieldSpecError, InternalError, PreconditionError


logger = logging.getLogger("maxker.gf")

FieldElem = galois.FieldArray
ModulusLike = Union[int, Sequence[int], galois.Poly]


@dataclass(frozen=True, eq=False)
class FieldCtx:
    p: int
    e: int
    n: int
    modulus: int
    GF: type = field(repr=False)
    theta: int = field(repr=False)
    gamma: int = field(repr=False)
    coord_inv: galois.FieldArray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def degree(self) -> int:
        return self.e * self.n

    @property
    def order(self) -> int:
        return self.p**self.degree

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.p, self.e, self.n, self.modulus)

    @property
    def spec(self) -> str:
        return f"{self.p}^{self.e}^{self.n}/{self.modulus}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldCtx):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __call__(self, value) -> FieldElem:
        return self.GF(value)

    @property
    def zero(self) -> FieldElem:
        return self.GF(0)

    @property
    def one(self) -> FieldElem:
        return self.GF(1)

    def elements(self) -> FieldElem:
        return self.GF.elements

    def modulus_poly(self) -> galois.Poly:
        return galois.Poly.Int(self.modulus, field=galois.GF(self.p))


def _modulus_to_poly(p: int, modulus: ModulusLike) -> galois.Poly:
    GFp = galois.GF(p)
    if isinstance(modulus, galois.Poly):
        return galois.Poly(modulus.coeffs.view(np.ndarray) % p, field=GFp)
    if isinstance(modulus, (int, np.integer)):
        if modulus < 0:
            raise FieldSpecError(f"módulo negativo: {modulus}")
        return galois.Poly.Int(int(modulus), field=GFp)
    coeffs = [int(c) for c in modulus]
    if any(c < 0 or c >= p for c in coeffs):
        raise FieldSpecError(f"coeficientes del módulo fuera de [0, {p})")
    return galois.Poly(coeffs, field=GFp, order="asc")


def _digits(p: int, width: int, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    powers = p ** np.arange(width, dtype=np.int64)
    return (values[..., None] // powers) % p


def _subfield_nonzero(GF: type, q: int, m: int) -> FieldElem:
    order = GF.order
    sub = q**m
    step = (order - 1) // (sub - 1)
    exps = np.arange(sub - 1, dtype=np.int64) * step
    return GF.primitive_element ** exps


def _exact_degree(GF: type, p: int, z: FieldElem, e: int) -> bool:
    for d in range(1, e):
        if e % d == 0 and z ** (p**d) == z:
            return False
    return True


@lru_cache(maxsize=None)
def _build(p: int, e: int, n: int, modulus: int) -> FieldCtx:
    degree = e * n
    poly = galois.Poly.Int(modulus, field=galois.GF(p))
    if degree == 1:
        GF = galois.GF(p)
    else:
        GF = galois.GF(p**degree, irreducible_poly=poly)
    q = p**e
    GFp = galois.GF(p)

    theta = 1
    if e > 1:
        fq = np.sort(_subfield_nonzero(GF, q, 1).view(np.ndarray))
        theta = next((int(v) for v in fq if _exact_degree(GF, p, GF(int(v)), e)), 0)
        if not theta:
            raise InternalError(f"no se encontró generador de F_{q} en {GF.name}")

    th = GF(theta)
    theta_pows = th ** np.arange(e, dtype=np.int64)

    def basis_matrix(g: FieldElem) -> galois.FieldArray:
        cols = (g ** np.arange(n, dtype=np.int64))[:, None] * theta_pows[None, :]
        return GFp(_digits(p, degree, cols.reshape(-1).view(np.ndarray)).T)

    gamma = 0
    matrix = None
    for v in range(1, GF.order):
        candidate = basis_matrix(GF(v))
        if np.linalg.matrix_rank(candidate) == degree:
            gamma, matrix = v, candidate
            break
    if matrix is None:
        raise InternalError(f"no se encontró gamma en {GF.name}")

    ctx = FieldCtx(
        p=p,
        e=e,
        n=n,
        modulus=modulus,
        GF=GF,
        theta=theta,
        gamma=gamma,
        coord_inv=np.linalg.inv(matrix),
    )
    logger.debug("Cuerpo %s: theta=%d gamma=%d", ctx.spec, theta, gamma)
    return ctx


def make_field(p: int, e: int, n: int, modulus: Optional[ModulusLike] = None) -> FieldCtx:
    if not galois.is_prime(p):
        raise FieldSpecError(f"p={p} no es primo")
    if e < 1 or n < 1:
        raise FieldSpecError(f"e y n deben ser positivos (e={e}, n={n})")
    degree = e * n
    if modulus is None:
        poly = galois.irreducible_poly(p, degree, method="min")
    else:
        poly = _modulus_to_poly(p, modulus)
        if poly.degree != degree:
            raise FieldSpecError(f"el módulo tiene grado {poly.degree}, se esperaba {degree}")
        if int(poly.coeffs[0]) != 1:
            raise FieldSpecError("el módulo debe ser mónico")
        if not poly.is_irreducible():
            raise FieldSpecError(f"el módulo {poly} es reducible sobre F_{p}")
    return _build(p, e, n, int(poly))


def check_same(*ctxs: FieldCtx) -> FieldCtx:
    first = ctxs[0]
    for other in ctxs[1:]:
        if other != first:
            raise FieldMismatchError(f"cuerpos distintos: {first.spec} vs {other.spec}")
    return first


def encode(ctx: FieldCtx, z: FieldElem) -> int:
    return int(z)


def decode(ctx: FieldCtx, value: int) -> FieldElem:
    if not 0 <= int(value) < ctx.order:
        raise PreconditionError(f"elemento {value} fuera de [0, {ctx.order})")
    return ctx.GF(int(value))


def frobenius_q(ctx: FieldCtx, z: FieldElem, j: int) -> FieldElem:
    return z ** (ctx.q ** (j % ctx.n))


def _check_divisor(ctx: FieldCtx, m: int) -> None:
    if m < 1 or ctx.n % m:
        raise PreconditionError(f"m={m} no divide n={ctx.n}")


def norm_to(ctx: FieldCtx, z: FieldElem, m: int = 1) -> FieldElem:
    _check_divisor(ctx, m)
    result = z
    for i in range(1, ctx.n // m):
        result = result * frobenius_q(ctx, z, m * i)
    return result


def trace_to(ctx: FieldCtx, z: FieldElem, m: int = 1) -> FieldElem:
    _check_divisor(ctx, m)
    result = z
    for i in range(1, ctx.n // m):
        result = result + frobenius_q(ctx, z, m * i)
    return result


def in_subfield(ctx: FieldCtx, z: FieldElem, m: int) -> bool:
    _check_divisor(ctx, m)
    return bool(np.all(frobenius_q(ctx, z, m) == z))


def subfield_elements(ctx: FieldCtx, m: int) -> FieldElem:
    """Elementos de F_{q^m} dentro de F_{q^n}, en orden de codificación."""
    _check_divisor(ctx, m)
    nonzero = _subfield_nonzero(ctx.GF, ctx.q, m).view(np.ndarray)
    return ctx.GF(np.sort(np.concatenate([[0], nonzero])))


def fq_coordinates(ctx: FieldCtx, z: FieldElem) -> FieldElem:
    """(c_0, ..., c_{n-1}) en F_q (como elementos de F_{q^n}) con z = sum c_i gamma^i."""
    z = ctx.GF(z)
    GFp = galois.GF(ctx.p)
    digits = GFp(_digits(ctx.p, ctx.degree, z.view(np.ndarray)))
    x = digits @ ctx.coord_inv.T
    x = x.view(np.ndarray).reshape(z.shape + (ctx.n, ctx.e))
    theta_pows = ctx.GF(ctx.theta) ** np.arange(ctx.e, dtype=np.int64)
    return np.sum(ctx.GF(x) * theta_pows, axis=-1)


def from_fq_coordinates(ctx: FieldCtx, coords: FieldElem) -> FieldElem:
    coords = ctx.GF(coords)
    gamma_pows = ctx.GF(ctx.gamma) ** np.arange(ctx.n, dtype=np.int64)
    return np.sum(coords * gamma_pows, axis=-1)


@lru_cache(maxsize=None)
def _embedding_root(small: FieldCtx, big: FieldCtx) -> int:
    roots = _subfield_nonzero(big.GF, big.p, small.degree)
    lifted = galois.Poly([int(c) for c in small.modulus_poly().coeffs], field=big.GF)
    values = lifted(roots)
    hits = np.sort(roots[values == 0].view(np.ndarray))
    if hits.size == 0:
        raise InternalError(f"sin raíz del módulo de {small.spec} en {big.spec}")
    return int(hits[0])


def embed(small: FieldCtx, big: FieldCtx, z: FieldElem) -> FieldElem:
    """Encaje F_{p^{en}} -> F_{p^{e'n'}}; envía la variable del módulo a su menor raíz."""
    if small.p != big.p or big.degree % small.degree:
        raise FieldMismatchError(f"{small.spec} no se encaja en {big.spec}")
    if small.q != big.q:
        raise FieldMismatchError(f"q distinto: {small.q} vs {big.q}")
    root = big.GF(_embedding_root(small, big))
    root_pows = root ** np.arange(small.degree, dtype=np.int64)
    digits = _digits(small.p, small.degree, small.GF(z).view(np.ndarray))
    return np.sum(big.GF(digits) * root_pows, axis=-1)


def random_elements(ctx: FieldCtx, rng: np.random.Generator, size: int, nonzero: bool = False) -> FieldElem:
    low = 1 if nonzero else 0
    return ctx.GF(rng.integers(low, ctx.order, size=size, dtype=np.int64))


def field_info(ctx: FieldCtx) -> dict[str, object]:
    return {
        "field": ctx.spec,
        "p": ctx.p,
        "e": ctx.e,
        "n": ctx.n,
        "q": ctx.q,
        "order": ctx.order,
        "modulus": ctx.modulus,
        "modulus_poly": str(ctx.modulus_poly()),
        "theta": ctx.theta,
        "gamma": ctx.gamma,
    }


__all__ = [
    "FieldCtx",
    "FieldElem",
    "make_field",
    "check_same",
    "encode",
    "decode",
    "frobenius_q",
    "norm_to",
    "trace_to",
    "in_subfield",
    "subfield_elements",
    "fq_coordinates",
    "from_fq_coordinates",
    "embed",
    "random_elements",
    "field_info",
]
