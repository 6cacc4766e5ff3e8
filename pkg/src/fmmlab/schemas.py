"""Pydantic request/response models for the HTTP service.

Formulas travel in the HM text format (the same format the CLI reads and
writes), float matrices as nested lists, straight-line programs as their
text rendering.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class HMText(BaseModel):
    hm: str = Field(description="formula in HM text format")


class ValidateResponse(BaseModel):
    valid: bool
    first_failure: Optional[list] = None
    max_residual: float = 0.0


class GammaResponse(BaseModel):
    name: Optional[str] = None
    gamma21: float
    gamma_11inf: float
    gamma_21inf: float
    gamma_01inf: float
    q0: int
    norm23: float
    frobenius_product: float


class BoundRequest(BaseModel):
    hm: str
    k0: int = 1
    ell: int = 0
    norm: Literal["inf", "2"] = "inf"


class BoundResponse(BaseModel):
    kappa: float
    gamma: float
    q0: int
    k0: int
    ell: int
    norm: str


class OrbitApplyRequest(BaseModel):
    hm: str
    rho: str = Field(description="positive number; a fraction like 9/8 selects the exact backend")
    xi: str = Field(description="number; a fraction like -1/2 selects the exact backend")
    exact: bool = True


class OrbitApplyResponse(BaseModel):
    hm: Optional[str] = None  # exact backend only
    matrices: Optional[list[list[list[float]]]] = None  # float backend
    gamma21: float
    exact: bool


class HMResponse(BaseModel):
    hm: str
    gamma21: Optional[float] = None


class OptimizeOrbitRequest(BaseModel):
    starts: int = 8
    tol: float = 1e-12


class OptimizeOrbitResponse(BaseModel):
    rho: float
    xi: float
    gamma: float


class FrobeniusRequest(BaseModel):
    starts: int = 8
    tol: float = 1e-12


class FrobeniusResponse(BaseModel):
    point: list[float]
    value: float
    gradient_norm: float


class ApproxRequest(BaseModel):
    order: int = 4


class SparsifyRotRequest(BaseModel):
    hm: str
    objective: Literal["nnz", "canonical_vectors"] = "nnz"
    budget: int = 720


class SparsifyRotResponse(BaseModel):
    matrices: list[list[list[float]]]  # L, R, Pt of the float result
    nnz: int
    canonical_rows: int
    gamma21: float


class SparsifyResponse(BaseModel):
    cob: str
    sparse: str
    improved: bool
    core_additions: int
    core_gamma21: float


class SlpRequest(BaseModel):
    matrix: str = Field(description="coefficient rows, one line per row")
    mode: Literal["naive", "optimize", "kernel", "transpose"] = "naive"


class SlpResponse(BaseModel):
    program: str
    adds: int
    scales: int
    muls: int
    halvings: int


class CompileRequest(BaseModel):
    hm: str
    strategy: Literal["naive", "cse", "kernel"] = "kernel"


class MultiplyRequest(BaseModel):
    a: list[list[float]]
    b: list[list[float]]
    algorithm: str = "strassen"
    sparse: bool = False
    cutoff: int = 1


class MultiplyResponse(BaseModel):
    c: list[list[float]]


class BenchRequest(BaseModel):
    algs: list[str]
    dists: list[str] = ["normal"]
    sizes: list[int] = [32, 64]
    seeds: int = 11
    cutoff: int = 1
    cond: float = 1e12
    master_seed: int = 0


class BenchResponse(BaseModel):
    csv: str
    summary_csv: str


class TablesResponse(BaseModel):
    text: str


class CatalogEntry(BaseModel):
    name: str
    rank: int
    brent_valid: bool
    gamma21: float
