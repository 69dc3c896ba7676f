import math
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator

from constants import TWO_PI
from saddlecount.errors import MalformedSpec

# --- SurfaceSpec documents (1-indexed permutations, see README) ---
class SquareTiledSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["square_tiled"]
    n: int = Field(..., ge=1)
    h: List[int]
    v: List[int]


class PolygonSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["polygons"]
    polygons: List[List[Tuple[float, float]]] = Field(..., min_length=1)
    gluings: List[Tuple[Tuple[int, int], Tuple[int, int]]]


SurfaceSpec = Annotated[Union[SquareTiledSpec, PolygonSpec], Field(discriminator="type")]
_surface_adapter = TypeAdapter(SurfaceSpec)


def parse_surface_spec(data: object) -> SquareTiledSpec | PolygonSpec:
    if isinstance(data, (SquareTiledSpec, PolygonSpec)):
        return data
    try:
        return _surface_adapter.validate_python(data)
    except ValidationError as exc:
        raise MalformedSpec(f"SurfaceSpec does not parse: {exc.errors()[0]['msg']}") from exc


# --- Counting inputs ---
class SectorSpec(BaseModel):
    """Half-open angular sector [phi1, phi2), angles from the positive x-axis."""
    model_config = ConfigDict(frozen=True)

    phi1: float = 0.0
    phi2: float = TWO_PI

    @model_validator(mode="after")
    def _check_width(self) -> "SectorSpec":
        width = self.phi2 - self.phi1
        if not (math.isfinite(self.phi1) and math.isfinite(self.phi2)):
            raise ValueError("sector angles must be finite")
        if width < 0 or width > TWO_PI + 1e-12:
            raise ValueError("sector width must lie in [0, 2*pi]")
        return self

    @classmethod
    def full_circle(cls) -> "SectorSpec":
        return cls(phi1=0.0, phi2=TWO_PI)

    @classmethod
    def about_vertical(cls, lo: float, hi: float) -> "SectorSpec":
        """[pi/2 + lo, pi/2 + hi): offsets measured from the positive y-axis."""
        return cls(phi1=math.pi / 2 + lo, phi2=math.pi / 2 + hi)

    @property
    def width(self) -> float:
        return self.phi2 - self.phi1

    @property
    def centre(self) -> float:
        return 0.5 * (self.phi1 + self.phi2)

    @property
    def is_full(self) -> bool:
        return self.width >= TWO_PI


class ConfigurationFilter(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["all", "loop", "pair", "cylinders"] = "all"
    singularities: Tuple[int, ...] = ()
    with_multiplicity: bool = True

    @model_validator(mode="after")
    def _check_ids(self) -> "ConfigurationFilter":
        needed = {"all": 0, "cylinders": 0, "loop": 1, "pair": 2}[self.kind]
        if len(self.singularities) != needed:
            raise ValueError(f"configuration '{self.kind}' takes {needed} singularity ids")
        if any(item < 0 for item in self.singularities):
            raise ValueError("singularity ids are non-negative")
        return self


# --- Reports ---
class GrowthFit(BaseModel):
    c_hat: float
    error_exponent: float
    envelope_exponent: float
    tail_start: float
    T: List[float]
    residuals: List[float]
    refined_c: Optional[float] = None
    refined_exponent: Optional[float] = None


class SandwichReport(BaseModel):
    t: float
    theta: float
    theta_t: float
    lower: float
    middle: float
    upper: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.lower <= self.middle + self.slack and self.middle <= self.upper + self.slack


class MonteCarloReport(BaseModel):
    estimate: float
    std_error: float
    n: int
    seed: int


class SobolevEstimate(BaseModel):
    estimate: float
    std_error: float
    norm_term: float
    derivative_term: float
    n: int


class InterpolationReport(BaseModel):
    n: int
    T_lo: float
    T: float
    T_hi: float
    N_lo: int
    N: int
    N_hi: int
    ratio: float

    @property
    def holds(self) -> bool:
        return self.N_lo <= self.N <= self.N_hi


class ExponentLedger(BaseModel):
    lam: float = Field(..., gt=0, le=1, alias="lambda")
    alpha1: float
    alpha2: float
    beta: float
    eta: float
    eta1: float
    sigma: float
    kappa: float
    kappa_final: float
    uniform: bool = False

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("beta", "kappa")
    @classmethod
    def _positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @model_validator(mode="after")
    def _check_eta1(self) -> "ExponentLedger":
        if not (0 < self.eta1 < 2 * self.eta):
            raise ValueError("eta1 must satisfy 0 < eta1 < 2*eta")
        return self


# --- CSV rows ---
class HolonomyRow(BaseModel):
    norm: float
    x: float
    y: float
    start: int
    end: int
    separatrix: int
    multiplicity: int


class ScanRow(BaseModel):
    T: float
    N: int
    predicted: float
    residual: float


class SandwichRow(BaseModel):
    t: float
    theta: float
    theta_t: float
    lower: float
    middle: float
    upper: float
    slack: float


class SampleRow(BaseModel):
    x: float
    y: float
    phi: float


class MonteCarloRow(BaseModel):
    estimate: float
    std_error: float
    n: int
    seed: int


class IntegrabilityRow(BaseModel):
    t: float
    value: float
    running_sup: float
    nodes: int


class ProbeRow(BaseModel):
    ell: float
    count: int
    ratio: float
    running_sup: float


class LedgerRow(BaseModel):
    variant: str
    name: str
    value: float


class SingularityRow(BaseModel):
    id: int
    cone_angle_multiple: int
    cone_angle: float


class CountRow(BaseModel):
    T: float
    phi1: float
    phi2: float
    N: int
