"""Request/response models for the compute service."""
from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator


class RationalPair(BaseModel):
    """Rational coordinates given as strings like '-3/4' (or plain integers)."""

    x: str
    y: str


class LatticeCoords(BaseModel):
    s: float = Field(..., description="coordinate along omega1")
    t: float = Field(..., description="coordinate along omega2")


class CurveSpec(BaseModel):
    a: str
    b: str


class ModelSpec(BaseModel):
    curve: CurveSpec
    u: Union[RationalPair, LatticeCoords] = Field(
        ..., description="extension class: a rational point of E or lattice coordinates"
    )
    precision_bits: int = Field(128, ge=32, le=4096)


class GmHeightRequest(BaseModel):
    kind: Literal["gm"] = "gm"
    min_poly: Union[str, list[int]] = Field(
        ..., description="minimal polynomial: text 'x^2 - x - 1' or coefficients, constant last"
    )
    embedding_index: int = 0
    precision_bits: int = Field(128, ge=32, le=4096)


class EllipticHeightRequest(BaseModel):
    kind: Literal["elliptic"] = "elliptic"
    curve: CurveSpec
    point: Optional[RationalPair] = None
    identity: bool = False
    precision_bits: int = Field(128, ge=32, le=4096)
    tolerance: float = Field(1e-7, gt=0)


class FiberHeightRequest(BaseModel):
    kind: Literal["fiber"] = "fiber"
    min_poly: Union[str, list[int]]
    embedding_index: int = 0
    ladder_n: int = Field(1, ge=1, description="divide the toric part by this ladder level")
    precision_bits: int = Field(128, ge=32, le=4096)


HeightRequest = Union[GmHeightRequest, EllipticHeightRequest, FiberHeightRequest]


class HeightResponse(BaseModel):
    kind: str
    heights: dict[str, float]
    error_bound: Optional[float] = None
    depth: Optional[int] = None
    normalization: dict[str, object]


class EquidistRequest(BaseModel):
    """The experiment config; same keys as the TOML config files."""

    experiment: dict = Field(default_factory=dict)
    model: Optional[dict] = None
    orbits: dict
    functions: dict = Field(default_factory=lambda: {"character_box": 3})
    thresholds: dict = Field(default_factory=dict)
    include_csv: bool = True

    @field_validator("orbits")
    @classmethod
    def _has_levels(cls, v):
        if not v.get("levels"):
            raise ValueError("orbits.levels must be a nonempty list")
        return v


class EquidistResponse(BaseModel):
    report: dict
    csv: Optional[str] = None
    passed: bool


class IsogenyCheckRequest(BaseModel):
    model: ModelSpec
    n_list: list[int] = Field(default_factory=lambda: [1, 2, 4, 8, 16])
    branches: list[tuple[int, int]] = Field(default_factory=lambda: [(0, 0)])
    samples: int = Field(32, ge=1, le=10_000)
    seed: int = 0
    division_witness: Optional[RationalPair] = Field(
        None, description="rational Q' on E with Q = n Q' for the n^-2 height table"
    )
    witness_n_list: list[int] = Field(default_factory=lambda: [2, 3])

    @field_validator("n_list")
    @classmethod
    def _positive(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("ladder levels must be >= 1")
        return v


class IsogenyLevelRow(BaseModel):
    n: int
    branch: tuple[int, int]
    lambda_scaling_residual: float
    kernel_size: int
    kernel_maps_to_identity: bool
    cocycle_residual: float
    divide_roundtrip_residual: float


class LadderHeightTableRow(BaseModel):
    n: int
    h_divided: float
    n2_times_divided: float
    h_class: float
    residual: float


class IsogenyCheckResponse(BaseModel):
    rows: list[IsogenyLevelRow]
    ladder_heights: Optional[list[LadderHeightTableRow]] = None
    ladder_note: Optional[str] = None


class MeasureCheckRequest(BaseModel):
    model: Optional[ModelSpec] = None
    quadrature_order: int = Field(64, ge=8, le=4096)
    character_box: int = Field(3, ge=1, le=8)
    projection_n_max: int = Field(8, ge=1, le=64)
    ladder_levels: list[int] = Field(default_factory=lambda: [1, 2, 4, 8])
    mc_count: int = Field(100_000, ge=1000)
    seed: int = 0


class MeasureCheckResponse(BaseModel):
    s1_mass: float
    s1_mass_residual: float
    character_max_abs: float
    projection_max_residual: float
    re_squared_value: float
    ladder_rows: list[dict]
    notes: dict[str, str]


class ServiceInfo(BaseModel):
    name: str
    version: str
    endpoints: list[str]
