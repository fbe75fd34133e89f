"""FastAPI application exposing solve, spectrum and benchmark endpoints."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..bench import make_problem, run_experiment
from ..errors import StairsolveError
from ..pcg import PcgConfig, ResidualCriterion, pcg_solve
from ..precond import PreconditionerKind, build_preconditioner
from ..schur import build_schur, recover_primal
from ..spectrum import preconditioned_spectrum
from . import schemas

app = FastAPI(
    title="stairsolve",
    description="Stair-splitting preconditioners and PCG for symmetric "
    "block-tridiagonal systems, with a trajectory-optimization front end.",
    version="0.1.0",
)


def _kind(text: str) -> PreconditionerKind:
    try:
        return PreconditionerKind.parse(text)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (StairsolveError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/solve", response_model=schemas.SolveResponse)
def solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
    matrix = _guard(req.matrix.to_core)
    rhs = _guard(req.rhs.to_core)
    op = _guard(build_preconditioner, matrix, _kind(req.preconditioner))
    cfg = PcgConfig(req.tol, req.max_iter, ResidualCriterion(req.criterion))
    report = _guard(pcg_solve, matrix, rhs, op, cfg)
    return schemas.SolveResponse(
        solution=report.solution.segments.tolist(),
        iterations=report.iterations,
        converged=report.converged,
        residual_history=list(report.residual_history),
    )


@app.post("/spectrum", response_model=schemas.SpectrumResponse)
def spectrum(req: schemas.SpectrumRequest) -> schemas.SpectrumResponse:
    matrix = _guard(req.matrix.to_core)
    op = _guard(build_preconditioner, matrix, _kind(req.preconditioner))
    report = _guard(preconditioned_spectrum, matrix, op)
    return schemas.SpectrumResponse(
        eigenvalues=list(report.eigenvalues),
        lambda_min=report.lambda_min,
        lambda_max=report.lambda_max,
        condition_number=report.condition_number,
        spectral_radius=report.spectral_radius,
    )


@app.post("/bench", response_model=schemas.BenchResponse)
def bench(req: schemas.BenchRequest) -> schemas.BenchResponse:
    problem = _guard(
        make_problem,
        req.problem,
        N=req.N,
        h=req.h,
        state_weight=req.state_weight,
        control_weight=req.control_weight,
        terminal_weight=req.terminal_weight,
    )
    kinds = [_kind(text) for text in req.preconditioners]
    cfg = PcgConfig(req.tol, req.max_iter)
    records = _guard(run_experiment, problem, kinds, cfg, spectrum_only=req.spectrum_only)
    spectra = None
    if req.include_spectrum:
        spectra = {
            rec.preconditioner: list(rec.eigenvalues)
            for rec in records
            if rec.eigenvalues is not None
        }
    return schemas.BenchResponse(
        records=[
            schemas.ExperimentRecordModel(
                problem=rec.problem,
                preconditioner=rec.preconditioner,
                n=rec.n,
                m=rec.m,
                cond=rec.condition_number,
                cond_rel_jacobi=rec.normalized_condition,
                pcg_iters=rec.pcg_iterations,
                converged=rec.converged,
                tol=rec.tol,
                lambda_min=rec.lambda_min,
                lambda_max=rec.lambda_max,
            )
            for rec in records
        ],
        spectra=spectra,
    )


@app.post("/trajopt/solve", response_model=schemas.TrajoptSolveResponse)
def trajopt_solve(req: schemas.TrajoptSolveRequest) -> schemas.TrajoptSolveResponse:
    lin = _guard(req.linearization.to_core)
    system = _guard(build_schur, lin)
    op = _guard(build_preconditioner, system.S, _kind(req.preconditioner))
    cfg = PcgConfig(req.tol, req.max_iter)
    report = _guard(pcg_solve, system.S, system.gamma, op, cfg)
    step = _guard(recover_primal, lin, report.solution)
    return schemas.TrajoptSolveResponse(
        multipliers=report.solution.segments.tolist(),
        state_step=step.states.tolist(),
        control_step=step.controls.tolist(),
        iterations=report.iterations,
        converged=report.converged,
    )
