"""
Jerarquía de errores de maxker.

Cada error lleva un `code` estable que la CLI imprime en modo JSON
({"error": code, "detail": mensaje}).
"""

from __future__ import annotations


class MaxkerError(Exception):
    code = "maxker-error"

    def __init__(self, detail: str = "") -> None:
        super().__init__(detail or self.code)
        self.detail = detail or self.code


class FieldSpecError(MaxkerError):
    code = "bad-field-spec"


class PolySpecError(MaxkerError):
    code = "bad-poly-spec"


class FieldMismatchError(MaxkerError):
    code = "ctx-mismatch"


class PreconditionError(MaxkerError):
    code = "precondition"


class DependentBasisError(PreconditionError):
    code = "dependent-basis"


class NotMaximumKernelError(PreconditionError):
    code = "not-maximum-kernel"


class SemilinearOrderError(PreconditionError):
    code = "order-not-n"


class OrderCapExceeded(MaxkerError):
    code = "order-cap"

    def __init__(self, cap: int) -> None:
        super().__init__(f"orden de B supera el tope de {cap} iteraciones")
        self.cap = cap


class BudgetExceeded(MaxkerError):
    code = "budget-exceeded"

    def __init__(self, needed: int, budget: int) -> None:
        super().__init__(f"se requieren {needed} casos y el presupuesto es {budget}")
        self.needed = needed
        self.budget = budget


class ContradictionError(MaxkerError):
    code = "contradiction"


class InternalError(MaxkerError):
    code = "internal"


# Errores de especificación: la CLI los trata como errores de uso (exit 2)
USAGE_ERRORS = (FieldSpecError, PolySpecError)


__all__ = [
    "MaxkerError",
    "FieldSpecError",
    "PolySpecError",
    "FieldMismatchError",
    "PreconditionError",
    "DependentBasisError",
    "NotMaximumKernelError",
    "SemilinearOrderError",
    "OrderCapExceeded",
    "BudgetExceeded",
    "ContradictionError",
    "InternalError",
    "USAGE_ERRORS",
]
