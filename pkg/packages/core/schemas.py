"""
Modelos pydantic de las salidas JSON de la CLI.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel


class FieldInfo(BaseModel):
    field: str
    p: int
    e: int
    n: int
    q: int
    order: int
    modulus: int
    modulus_poly: str
    theta: int
    gamma: int


class EvalResult(BaseModel):
    poly: str
    z: int
    value: int


class KernelResult(BaseModel):
    poly: str
    degree: int
    kernel_dim: int
    basis: list[int]
    max_kernel: bool


class CheckMaxResult(BaseModel):
    poly: str
    method: str
    max_kernel: bool
    B_is_identity: Optional[bool] = None
    kernel_dim: int
    norm_condition: Optional[bool] = None


class SplittingResult(BaseModel):
    poly: str
    splitting_degree: int
    extension_field: Optional[str] = None
    roots_in_extension: Optional[int] = None
    roots_in_base: int
    extension: bool = False


class PolyResult(BaseModel):
    poly: str
    degree: int
    kernel_dim: int


class EnumerateResult(BaseModel):
    field: str
    s: int
    k: int
    strategy: str
    count: int
    gaussian_binomial: int
    witnesses: list[str]
    run_id: Optional[int] = None


class TableRowResult(BaseModel):
    row: str
    s: int
    k: int
    solutions: int
    all_max_kernel: bool


class TableDegreeResult(BaseModel):
    s: int
    k: int
    max_kernel: int
    union: int
    equal: bool


class VerifyTableResult(BaseModel):
    table: int
    field: str
    passed: bool
    rows: list[TableRowResult]
    degrees: list[TableDegreeResult]
    run_id: Optional[int] = None


class DeriveResult(BaseModel):
    field: str
    s: int
    a0: int
    a_n3: int
    poly: str
    closing: bool
    max_kernel: bool


class MRDResult(BaseModel):
    field: str
    k: int
    s: int
    is_mrd: bool
    max_kernel_dim: int
    min_rank: int
    worst: Optional[str] = None
    codewords_checked: int
    degree_bound_holds: bool = True
    run_id: Optional[int] = None


class TransferResult(BaseModel):
    field: str
    m: int
    s: int
    t: int
    coeffs: list[int]
    verdict_s: bool
    verdict_t: bool
    agree: bool


class TransferSweepResult(BaseModel):
    field: str
    m: int
    s: int
    t: int
    k: int
    checked: int
    disagreements: list[list[int]]
    agree: bool


class HistoryRow(BaseModel):
    id: int
    command: str
    field: str
    created_at: str
    witnesses: int


class ErrorResult(BaseModel):
    error: str
    detail: str


__all__ = [
    "FieldInfo",
    "EvalResult",
    "KernelResult",
    "CheckMaxResult",
    "SplittingResult",
    "PolyResult",
    "EnumerateResult",
    "TableRowResult",
    "TableDegreeResult",
    "VerifyTableResult",
    "DeriveResult",
    "MRDResult",
    "TransferResult",
    "TransferSweepResult",
    "HistoryRow",
    "ErrorResult",
]
