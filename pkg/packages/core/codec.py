"""
Formatos de texto de maxker.

- Cuerpo: "p^e^n[/modulus]" (modulus = codificación entera del polinomio de definición)
- Polinomio: "s=<int>;a=[<elem>,...]" con a_0..a_k en codificación entera
"""

from __future__ import annotations

import re
from functools import lru_cache

from errors import FieldSpecError, MaxkerError, PolySpecError
from gf import FieldCtx, make_field
from linpoly import LinearizedPoly


_FIELD_RE = re.compile(r"^\s*(\d+)\^(\d+)\^(\d+)(?:\s*/\s*(\d+))?\s*$")
_POLY_RE = re.compile(r"^\s*s\s*=\s*(-?\d+)\s*;\s*a\s*=\s*\[([^\]]*)\]\s*$")


@lru_cache(maxsize=None)
def parse_field(text: str) -> FieldCtx:
    match = _FIELD_RE.match(text or "")
    if not match:
        raise FieldSpecError(f"especificación de cuerpo inválida: {text!r}")
    p, e, n = (int(match.group(i)) for i in (1, 2, 3))
    modulus = int(match.group(4)) if match.group(4) is not None else None
    try:
        return make_field(p, e, n, modulus)
    except FieldSpecError:
        raise
    except MaxkerError as exc:
        raise FieldSpecError(str(exc)) from exc


def format_field(ctx: FieldCtx) -> str:
    return ctx.spec


def parse_poly(ctx: FieldCtx, text: str) -> LinearizedPoly:
    match = _POLY_RE.match(text or "")
    if not match:
        raise PolySpecError(f"especificación de polinomio inválida: {text!r}")
    s = int(match.group(1))
    body = match.group(2).strip()
    try:
        coeffs = [int(tok) for tok in body.split(",")] if body else []
    except ValueError as exc:
        raise PolySpecError(f"coeficiente no entero en {text!r}") from exc
    if not coeffs:
        raise PolySpecError("se requiere al menos un coeficiente")
    bad = [c for c in coeffs if not 0 <= c < ctx.order]
    if bad:
        raise PolySpecError(f"coeficientes fuera de [0, {ctx.order}): {bad}")
    if s < 1:
        raise PolySpecError(f"s debe ser positivo (s={s})")
    try:
        return LinearizedPoly.from_coeffs(ctx, s, coeffs)
    except MaxkerError as exc:
        raise PolySpecError(str(exc)) from exc


def format_poly(f: LinearizedPoly) -> str:
    return str(f)


__all__ = ["parse_field", "format_field", "parse_poly", "format_poly"]
