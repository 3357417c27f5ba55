"""
Structured Parameter Models for EP Lab
Using Pydantic for type-safe, validated parameter bundles and reports
"""
import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# ============================================================================
# Branch Selectors
# ============================================================================

class Branch(str, Enum):
    """Sign of lambda^2 for the constant-frequency families"""
    NEGATIVE = "neg"
    ZERO = "zero"
    POSITIVE = "pos"

    @classmethod
    def of(cls, lambda2: float) -> "Branch":
        if lambda2 > 0:
            return cls.POSITIVE
        if lambda2 < 0:
            return cls.NEGATIVE
        return cls.ZERO


class Sign(str, Enum):
    """Stacked +/- symbols in closed forms; PLUS selects the upper symbol"""
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sigma(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0


# ============================================================================
# Solution Family Parameters
# ============================================================================

class EPParams(BaseModel):
    """Constant-frequency parameter bundle of the dissipative SEP equation"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    lambda2: float = Field(description="lambda^2, any sign; selects the branch")
    c: float = Field(default=1.0, description="Inverse-cubic strength")
    c1: float = Field(default=1.0, description="Integration constant c1 (gamma in the particular solutions)")
    k: float = Field(default=-2.0, description="Chiellini constant")
    zeta0: float = Field(default=0.0, description="Time shift")
    sign: Sign = Field(default=Sign.PLUS, description="Upper (PLUS) or lower (MINUS) stacked symbol")

    @field_validator("k")
    @classmethod
    def _k_nonzero(cls, value: float) -> float:
        if value == 0:
            raise ValueError("Chiellini constant k must be nonzero")
        return value

    @property
    def branch(self) -> Branch:
        return Branch.of(self.lambda2)

    @property
    def lam(self) -> float:
        """|lambda|"""
        return math.sqrt(abs(self.lambda2))


class ReidParams(BaseModel):
    """Order m and amplitude constants of the Reid families"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    m: int = Field(ge=2, description="Order of the Reid nonlinearity q v^(1-2m)")
    branch: Branch = Field(description="Sign of lambda^2")
    lam: float = Field(default=0.5, gt=0, description="lambda > 0 (unused on the ZERO branch)")
    a_amp: float = Field(default=1.0, description="Amplitude constant a")
    b_amp: float = Field(default=1.0, description="Amplitude constant b (enters only the scaled strength)")
    c_tilde: float = Field(default=1.0, description="Reid strength c~")

    @property
    def A(self) -> float:
        return self.a_amp ** self.m

    @property
    def B(self) -> float:
        return self.c_tilde / (4.0 * self.lam ** 2 * self.a_amp ** self.m * (self.m - 1))

    @property
    def B0(self) -> float:
        return self.c_tilde / (self.m - 1)

    @property
    def c_tilde_m(self) -> float:
        """Scaled strength c~ / (4 lambda^2 (ab)^m (m-1))"""
        return self.c_tilde / (4.0 * self.lam ** 2 * (self.a_amp * self.b_amp) ** self.m * (self.m - 1))


class PinneyCoeffs(BaseModel):
    """Coefficients of the general Pinney superposition"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    alpha1: float
    alpha2: float
    alpha3: float
    c: float = Field(description="Inverse-cubic strength the superposition solves for")


class Hyp2F1Args(BaseModel):
    """Real arguments of the Gauss hypergeometric function"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    a: float
    b: float
    c: float
    z: float = Field(lt=1.0, description="Real argument, z < 1")

    @field_validator("c")
    @classmethod
    def _c_not_pole(cls, value: float) -> float:
        if value <= 0 and value == math.floor(value):
            raise ValueError("c must not be a non-positive integer")
        return value


class ErmakovPairState(BaseModel):
    """Values and derivatives of both Ermakov pair members at a common zeta"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    u: float
    u_dot: float
    v: float
    v_dot: float
    b: float = Field(description="Nonlinearity strength of the u member")
    c: float = Field(description="Nonlinearity strength of the v member")


class PhaseAccumulator(BaseModel):
    """Start point, offset and tolerance of a Milne phase integral"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    zeta_start: float = 0.0
    theta0: float = Field(default=0.0, description="Phase offset Theta_0")
    tolerance: float = Field(default=1e-10, gt=0)


# ============================================================================
# Validation Reports
# ============================================================================

class ValidationReport(BaseModel):
    """Per-check validation record"""
    suite: str = Field(default="", description="Validation suite the case belongs to")
    check: str = Field(description="Name of the check")
    case_id: str = Field(description="Stable case identifier, used for ordering")
    max_residual: float = Field(description="Largest residual observed")
    tolerance: float = Field(description="Acceptance tolerance")
    passed: bool
    monitored: bool = Field(default=False, description="Reported only; never fails a run")
    worst_at: List[float] = Field(default_factory=list, description="Sample locations of the worst residuals")
    samples: int = 0
    skipped_fraction: float = 0.0
    notes: str = ""

    @property
    def status(self) -> str:
        if self.monitored:
            return "MONITOR"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return f"{self.suite} {self.case_id} {self.max_residual:.6e} {self.tolerance:.1e} {self.status}"


# ============================================================================
# CLI Run Configuration
# ============================================================================

class Command(str, Enum):
    EVAL = "eval"
    PHASE = "phase"
    GFUNC = "gfunc"
    FIGURE = "figure"
    VALIDATE = "validate"


class Family(str, Enum):
    SEP = "sep"
    CHIELLINI = "chiellini"
    REID = "reid"
    THEOREM = "theorem"


class Suite(str, Enum):
    RESIDUAL = "residual"
    INVARIANT = "invariant"
    CHIELLINI = "chiellini"
    PHASE = "phase"
    FACTORIZATION = "factorization"
    ABEL = "abel"
    ALL = "all"


class OutputFormat(str, Enum):
    CSV = "csv"
    SVG = "svg"


class RunConfig(BaseModel):
    """Validated command line request"""
    command: Command
    family: Optional[Family] = None
    branch: Optional[Branch] = None
    m: int = Field(default=2, ge=2)
    lambda2: float = 0.25
    c: float = 1.0
    b: float = 1.0
    c1: float = 1.0
    k: float = -2.0
    c_tilde: float = 1.0
    a_amp: float = 1.0
    i_bc: float = 1.0
    theta0: float = 0.0
    reference_constants: bool = Field(default=False, description="Use the branch constants of the reference reid u solutions")
    sign: Sign = Sign.PLUS
    zeta_min: float = 0.0
    zeta_max: float = 6.0
    samples: int = Field(default=601, ge=2)
    out_path: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    figure_id: Optional[int] = None
    suite: Suite = Suite.ALL

    @model_validator(mode="after")
    def _check_combination(self) -> "RunConfig":
        if not self.zeta_min < self.zeta_max:
            raise ValueError("zeta_min must be smaller than zeta_max")
        if self.command in (Command.EVAL, Command.PHASE) and self.family is None:
            raise ValueError(f"{self.command.value} requires --family")
        if self.command is Command.PHASE and self.family in (Family.SEP, Family.THEOREM):
            raise ValueError("phase is defined for the reid and chiellini families")
        if self.family in (Family.SEP, Family.REID) and self.branch is None:
            raise ValueError(f"family {self.family.value} requires --branch")
        if self.branch is not None and self.branch is not Branch.of(self.lambda2):
            raise ValueError(f"--branch {self.branch.value} contradicts the sign of --lambda2")
        if self.family in (Family.CHIELLINI, Family.THEOREM) or self.command is Command.GFUNC:
            if self.k != -2:
                raise ValueError("closed-form Chiellini solutions exist only for k = -2")
            if Branch.of(self.lambda2) is Branch.ZERO and self.c1 == 0:
                raise ValueError("the zero branch requires a nonzero --c1")
        if self.command is Command.FIGURE and self.figure_id is None:
            raise ValueError("figure requires --id")
        return self
