"""Request/response models for the certificate service."""

from pydantic import BaseModel, Field, field_validator

from ..model import Certificate


class ProblemSpec(BaseModel):
    a: float = Field(gt=0, lt=1, description="fractional order")
    u0: float = Field(description="initial value, must be nonzero")
    T: float = Field(gt=0, description="horizon")
    h: str = Field(description="regularized RHS h(x,t) = x^a f(x,t), an expression in x and t")

    @field_validator("u0")
    @classmethod
    def _nonzero(cls, value: float) -> float:
        if value == 0.0:
            raise ValueError("initial value must be nonzero")
        return value


class CheckSettings(BaseModel):
    r: float = Field(default=1.0, gt=0, description="radius of the t-box for the growth constant")
    t_box: tuple[float, float] | None = Field(
        default=None, description="t sampling box; defaults to [u0-5, u0+5]"
    )
    nx: int = Field(default=256, ge=2)
    nt: int = Field(default=256, ge=2)
    compat_tol: float = Field(default=1e-9, gt=0)
    nagumo_tolerance: float = Field(default=1e-9, ge=0)


class SolverSettings(BaseModel):
    n_grid: int = Field(default=129, ge=9)
    n_quad: int = Field(default=32, ge=4)
    tol: float = Field(default=1e-10, gt=0)
    max_iter: int = Field(default=200, ge=1)
    divergence_factor: float = Field(default=10.0, gt=1)
    t0: float | None = Field(default=None, gt=0, description="solution horizon; computed when omitted")
    u_init: str | None = Field(default=None, description="initial guess, an expression in x")


class CertificateModel(BaseModel):
    kind: str
    passed: bool
    estimate: float
    threshold: float
    samples: int
    tolerance: float
    notes: str

    @classmethod
    def from_certificate(cls, cert: Certificate) -> "CertificateModel":
        return cls(**cert.to_dict())


class CheckRequest(BaseModel):
    problem: ProblemSpec
    check: CheckSettings = CheckSettings()


class CheckResponse(BaseModel):
    passed: bool
    problem: ProblemSpec
    certificates: list[CertificateModel]


class SolveRequest(BaseModel):
    problem: ProblemSpec
    solver: SolverSettings = SolverSettings()
    check: CheckSettings = CheckSettings()


class SolveResponse(BaseModel):
    converged: bool
    iterations: int
    residual_sup: float
    t0: float
    grid: list[float]
    values: list[float]
    node_residuals: list[float]
    certificates: list[CertificateModel]


class MvtRequest(BaseModel):
    function: str = Field(description="expression in x convertible to a power sum")
    a: float = Field(gt=0, lt=1)
    x: float = Field(gt=0)


class MvtResponse(BaseModel):
    lam: float
    ratio: float
    identity_residual: float
    degenerate: bool


class ProbeRequest(BaseModel):
    problem: ProblemSpec
    solver: SolverSettings = SolverSettings()
    check: CheckSettings = CheckSettings()
    inits: list[str] = Field(min_length=2, description="initial guesses, expressions in x")


class ProbeCluster(BaseModel):
    members: list[int]
    iterations: int
    residual_sup: float
    values: list[float]


class ProbeResponse(BaseModel):
    cluster_count: int
    grid: list[float]
    clusters: list[ProbeCluster]
    pairwise_distances: list[list[float]]
    diverged: list[int]
    unconverged: list[int]


class ExampleInfo(BaseModel):
    name: str
    description: str


class ExamplesResponse(BaseModel):
    examples: list[ExampleInfo]


class KnownSolutionModel(BaseModel):
    terms: list[tuple[float, float]]


class ExampleDetail(BaseModel):
    name: str
    problem: ProblemSpec
    known_solutions: list[KnownSolutionModel]
    notes: str
