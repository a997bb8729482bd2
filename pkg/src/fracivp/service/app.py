"""FastAPI service wrapping the solver and checker core.

The handler functions (run_check, run_solve, ...) contain the request ->
core -> response plumbing and are shared with the command-line client,
which calls them in process; the endpoints only add HTTP error mapping:

    422  malformed request (pydantic validation)
    400  expression/config errors (with 1-based position where known)
    409  mathematical refusals: failed compatibility gate, divergence,
         mean-value bracket failure
"""

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, expr
from ..analysis import (
    RootBracketError,
    catalog,
    catalog_names,
    expression_to_powersum,
    mvt_report,
)
from ..model import (
    Certificate,
    Problem,
    RegularizedRHS,
    SamplingSpec,
    apriori_bound,
    compatibility_check,
    estimate_growth_constant,
    estimate_nagumo_constant,
    existence_interval,
)
from ..solver import DivergenceError, SolverConfig, multistart_probe, picard_solve
from .schemas import (
    CertificateModel,
    CheckRequest,
    CheckResponse,
    ExampleDetail,
    ExampleInfo,
    ExamplesResponse,
    KnownSolutionModel,
    MvtRequest,
    MvtResponse,
    ProbeCluster,
    ProbeRequest,
    ProbeResponse,
    ProblemSpec,
    SolveRequest,
    SolveResponse,
)

__all__ = [
    "app",
    "CompatibilityFailure",
    "run_check",
    "run_solve",
    "run_mvt",
    "run_probe",
    "run_examples",
    "run_example_detail",
]


class CompatibilityFailure(Exception):
    """The problem fails the compatibility gate; solving is refused."""

    def __init__(self, certificate: Certificate):
        super().__init__(
            f"compatibility condition fails: deviation {certificate.estimate!r} "
            f"exceeds {certificate.threshold!r}"
        )
        self.certificate = certificate


def build_problem(spec: ProblemSpec) -> Problem:
    return Problem(a=spec.a, u0=spec.u0, T=spec.T, h=RegularizedRHS.from_text(spec.h))


def _solver_config(settings) -> SolverConfig:
    return SolverConfig(
        n_grid=settings.n_grid,
        n_quad=settings.n_quad,
        tol=settings.tol,
        max_iter=settings.max_iter,
        divergence_factor=settings.divergence_factor,
    )


def run_check(req: CheckRequest) -> CheckResponse:
    p = build_problem(req.problem)
    grid = SamplingSpec(nx=req.check.nx, nt=req.check.nt)
    t_box = req.check.t_box
    compat = compatibility_check(p, tol=req.check.compat_tol)
    growth = estimate_growth_constant(p, req.check.r, grid)
    nagumo = estimate_nagumo_constant(
        p, t_box=t_box, grid=grid, tolerance=req.check.nagumo_tolerance
    )
    apriori = apriori_bound(p, t_box=t_box, grid=grid)
    interval = existence_interval(growth.estimate, req.check.r, p.T, p.a)
    return CheckResponse(
        passed=compat.passed,
        problem=req.problem,
        certificates=[
            CertificateModel.from_certificate(c)
            for c in (compat, growth, nagumo, apriori, interval)
        ],
    )


def run_solve(req: SolveRequest) -> SolveResponse:
    p = build_problem(req.problem)
    compat = compatibility_check(p, tol=req.check.compat_tol)
    if not compat.passed:
        raise CompatibilityFailure(compat)
    solution = picard_solve(
        p,
        _solver_config(req.solver),
        u_init=req.solver.u_init,
        t0=req.solver.t0,
        r=req.check.r,
        compat_tol=req.check.compat_tol,
    )
    return SolveResponse(
        converged=solution.converged,
        iterations=solution.iterations,
        residual_sup=solution.residual_sup,
        t0=float(solution.grid[-1]),
        grid=[float(v) for v in solution.grid],
        values=[float(v) for v in solution.values],
        node_residuals=[float(v) for v in solution.node_residuals],
        certificates=[CertificateModel.from_certificate(c) for c in solution.certificates],
    )


def run_mvt(req: MvtRequest) -> MvtResponse:
    u = expression_to_powersum(expr.parse(req.function))
    result = mvt_report(u, req.a, req.x)
    return MvtResponse(
        lam=result.lam,
        ratio=result.ratio,
        identity_residual=result.identity_residual,
        degenerate=result.degenerate,
    )


def run_probe(req: ProbeRequest) -> ProbeResponse:
    p = build_problem(req.problem)
    compat = compatibility_check(p, tol=req.check.compat_tol)
    if not compat.passed:
        raise CompatibilityFailure(compat)
    cfg = _solver_config(req.solver)
    report = multistart_probe(p, cfg, list(req.inits), t0=req.solver.t0, r=req.check.r)

    unconverged = [
        index
        for index, sol in zip(report.start_indices, report.solutions)
        if not sol.converged
    ]
    reps = report.representatives
    distances = [
        [float(np.max(np.abs(ri.values - rj.values))) for rj in reps] for ri in reps
    ]
    grid = report.solutions[0].grid if report.solutions else np.array([])
    return ProbeResponse(
        cluster_count=report.cluster_count,
        grid=[float(v) for v in grid],
        clusters=[
            ProbeCluster(
                members=list(members),
                iterations=rep.iterations,
                residual_sup=rep.residual_sup,
                values=[float(v) for v in rep.values],
            )
            for members, rep in zip(report.cluster_members, reps)
        ],
        pairwise_distances=distances,
        diverged=list(report.diverged),
        unconverged=unconverged,
    )


def run_examples() -> ExamplesResponse:
    return ExamplesResponse(
        examples=[
            ExampleInfo(name=name, description=description)
            for name, description in catalog_names().items()
        ]
    )


def run_example_detail(name: str, **params: float) -> ExampleDetail:
    example = catalog(name, **params)
    return ExampleDetail(
        name=example.name,
        problem=ProblemSpec(
            a=example.problem.a,
            u0=example.problem.u0,
            T=example.problem.T,
            h=example.problem.h.source,
        ),
        known_solutions=[
            KnownSolutionModel(terms=[(c, e) for c, e in ps.terms])
            for ps in example.known_solutions
        ],
        notes=example.notes,
    )


app = FastAPI(
    title="fracivp",
    description="Certificates and Picard solutions for fractional IVPs "
                "with origin-singular right-hand sides",
    version=__version__,
)


@app.exception_handler(expr.ExpressionError)
async def _expression_error(request: Request, exc: expr.ExpressionError):
    return JSONResponse(
        status_code=400,
        content={"detail": str(exc), "position": exc.position},
    )


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(CompatibilityFailure)
async def _compat_failure(request: Request, exc: CompatibilityFailure):
    return JSONResponse(
        status_code=409,
        content={
            "detail": str(exc),
            "certificate": CertificateModel.from_certificate(exc.certificate).model_dump(),
        },
    )


@app.exception_handler(DivergenceError)
async def _divergence(request: Request, exc: DivergenceError):
    return JSONResponse(
        status_code=409,
        content={"detail": str(exc), "iterations": exc.iterations},
    )


@app.exception_handler(RootBracketError)
async def _bracket(request: Request, exc: RootBracketError):
    return JSONResponse(status_code=409, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/v1/examples", response_model=ExamplesResponse)
def examples() -> ExamplesResponse:
    return run_examples()


@app.get("/v1/examples/{name}", response_model=ExampleDetail)
def example_detail(name: str, a: float | None = None, T: float | None = None,
                   beta: float | None = None) -> ExampleDetail:
    params = {k: v for k, v in (("a", a), ("T", T), ("beta", beta)) if v is not None}
    return run_example_detail(name, **params)


@app.post("/v1/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    return run_check(req)


@app.post("/v1/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    return run_solve(req)


@app.post("/v1/mvt", response_model=MvtResponse)
def mvt(req: MvtRequest) -> MvtResponse:
    return run_mvt(req)


@app.post("/v1/probe", response_model=ProbeResponse)
def probe(req: ProbeRequest) -> ProbeResponse:
    return run_probe(req)
