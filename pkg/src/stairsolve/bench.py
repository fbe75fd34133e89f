"""Benchmark problem generators and the preconditioner comparison experiment.

Two analytic systems exercise every code path: a damped pendulum swing-up
(state dimension 2) and a cart-pole swing-up (state dimension 4). Each is
linearized once around a deterministic nominal trajectory (states linearly
interpolated from start to goal, controls zero) to produce the
block-tridiagonal multiplier system the experiment solves with each
preconditioner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blocktri import BlockVector
from .errors import StairsolveError
from .pcg import PcgConfig, pcg_solve
from .precond import JACOBI, PreconditionerKind, build_preconditioner
from .schur import TrajoptLinearization, build_schur
from .spectrum import power_iteration_radius, preconditioned_spectrum, spectrum_csv_rows

PROBLEM_NAMES = ("pendulum", "cartpole")

CSV_HEADER = "problem,preconditioner,n,m,cond,cond_rel_jacobi,pcg_iters,converged,tol,lambda_min,lambda_max"


@dataclass(frozen=True)
class PendulumParams:
    mass: float = 1.0       # kg
    length: float = 1.0     # m
    damping: float = 0.1    # N m s / rad
    gravity: float = 9.81   # m / s^2


@dataclass(frozen=True)
class CartPoleParams:
    cart_mass: float = 1.0  # kg
    pole_mass: float = 0.5  # kg
    length: float = 0.5     # m, pivot to point mass
    gravity: float = 9.81   # m / s^2


def pendulum_dynamics(x: np.ndarray, u: np.ndarray, params: PendulumParams):
    """Damped pendulum, state (angle, rate), angle zero hanging down.

        angle_acc = (u - m g l sin(angle) - b rate) / (m l^2)

    Returns (xdot, Jx, Ju) with analytic Jacobians.
    """
    m, l, b, g = params.mass, params.length, params.damping, params.gravity
    angle, rate = x
    inertia = m * l * l
    acc = (u[0] - m * g * l * np.sin(angle) - b * rate) / inertia
    xdot = np.array([rate, acc])
    Jx = np.array([[0.0, 1.0], [-g * np.cos(angle) / l, -b / inertia]])
    Ju = np.array([[0.0], [1.0 / inertia]])
    return xdot, Jx, Ju


def cartpole_dynamics(x: np.ndarray, u: np.ndarray, params: CartPoleParams):
    """Cart-pole, state (cart pos, pole angle, cart vel, pole rate), angle zero
    hanging down, force on the cart as the single control.

        cart_acc = (f + mp s (l w^2 + g c)) / (mc + mp s^2)
        pole_acc = (-f c - mp l w^2 s c - (mc + mp) g s) / (l (mc + mp s^2))

    Returns (xdot, Jx, Ju) with analytic Jacobians.
    """
    mc, mp, l, g = params.cart_mass, params.pole_mass, params.length, params.gravity
    _, angle, cart_vel, rate = x
    f = u[0]
    s, c = np.sin(angle), np.cos(angle)
    den = mc + mp * s * s
    dden = 2.0 * mp * s * c
    num_cart = f + mp * s * (l * rate * rate + g * c)
    cart_acc = num_cart / den
    num_pole = -f * c - mp * l * rate * rate * s * c - (mc + mp) * g * s
    pole_acc = num_pole / (l * den)

    d_cart_angle = (mp * c * l * rate * rate + mp * g * (c * c - s * s)) / den \
        - num_cart * dden / (den * den)
    d_cart_rate = 2.0 * mp * s * l * rate / den
    d_pole_angle = (f * s - mp * l * rate * rate * (c * c - s * s) - (mc + mp) * g * c) / (l * den) \
        - num_pole * dden / (l * den * den)
    d_pole_rate = -2.0 * mp * rate * s * c / den

    xdot = np.array([cart_vel, rate, cart_acc, pole_acc])
    Jx = np.array([
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, d_cart_angle, 0.0, d_cart_rate],
        [0.0, d_pole_angle, 0.0, d_pole_rate],
    ])
    Ju = np.array([[0.0], [0.0], [1.0 / den], [-c / (l * den)]])
    return xdot, Jx, Ju


def continuous_dynamics(name: str, x: np.ndarray, u: np.ndarray, params):
    """Dispatch to the named system's dynamics; returns (xdot, Jx, Ju)."""
    if name == "pendulum":
        return pendulum_dynamics(x, u, params)
    if name == "cartpole":
        return cartpole_dynamics(x, u, params)
    raise ValueError(f"unknown problem {name!r}; choose from {PROBLEM_NAMES}")


def discretize(dynamics, x: np.ndarray, u: np.ndarray, h: float):
    """Explicit-Euler transition Jacobians A = I + h Jx, B = h Ju."""
    if not h > 0.0:
        raise ValueError(f"timestep must be positive, got {h}")
    _, Jx, Ju = dynamics(x, u)
    return np.eye(len(x)) + h * Jx, h * Ju


def euler_step(dynamics, x: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
    """One explicit Euler step of the continuous dynamics."""
    xdot, _, _ = dynamics(x, u)
    return x + h * xdot


@dataclass(frozen=True, eq=False)
class BenchmarkProblem:
    """A swing-up instance: horizon, timestep, endpoints, weights, physics and
    the nominal trajectory the QP is linearized around."""

    name: str
    N: int
    h: float
    x_start: np.ndarray
    x_goal: np.ndarray
    state_weight: float
    control_weight: float
    terminal_weight: float
    params: object
    nominal_states: np.ndarray
    nominal_controls: np.ndarray

    @property
    def nx(self) -> int:
        return self.x_start.shape[0]

    @property
    def nu(self) -> int:
        return 1

    def dynamics(self, x: np.ndarray, u: np.ndarray):
        return continuous_dynamics(self.name, x, u, self.params)


def make_problem(
    name: str,
    N: int = 16,
    h: float = 0.1,
    state_weight: float = 1.0,
    control_weight: float = 0.1,
    terminal_weight: float = 10.0,
    params=None,
) -> BenchmarkProblem:
    """Build a benchmark problem with the default swing-up endpoints and a
    linearly interpolated nominal trajectory."""
    if name not in PROBLEM_NAMES:
        raise ValueError(f"unknown problem {name!r}; choose from {PROBLEM_NAMES}")
    if N < 2:
        raise ValueError(f"need at least two knot points, got N={N}")
    if not h > 0.0:
        raise ValueError(f"timestep must be positive, got {h}")
    if min(state_weight, control_weight, terminal_weight) <= 0.0:
        raise ValueError("cost weights must be strictly positive")
    if name == "pendulum":
        params = params or PendulumParams()
        x_start = np.zeros(2)
        x_goal = np.array([np.pi, 0.0])
    else:
        params = params or CartPoleParams()
        x_start = np.zeros(4)
        x_goal = np.array([0.0, np.pi, 0.0, 0.0])
    alphas = np.linspace(0.0, 1.0, N)[:, None]
    nominal_states = x_start[None, :] * (1.0 - alphas) + x_goal[None, :] * alphas
    nominal_controls = np.zeros((N - 1, 1))
    return BenchmarkProblem(
        name, N, h, x_start, x_goal,
        state_weight, control_weight, terminal_weight,
        params, nominal_states, nominal_controls,
    )


def linearize_problem(problem: BenchmarkProblem) -> TrajoptLinearization:
    """Quadratic approximation of the swing-up problem around its nominal.

    Tracking cost: state_weight on every knot, terminal_weight on the last,
    control_weight on each control; gradients are evaluated at the nominal.
    The constraint vector holds the initial-state residual and the explicit
    Euler defects ``nominal_{k+1} - step(nominal_k, control_k)``.
    """
    N, nx, nu = problem.N, problem.nx, problem.nu
    dyn = problem.dynamics
    Q = np.stack(
        [np.eye(nx) * (problem.terminal_weight if k == N - 1 else problem.state_weight)
         for k in range(N)]
    )
    R = np.stack([np.eye(nu) * problem.control_weight for _ in range(N - 1)])
    q = np.stack([Q[k] @ (problem.nominal_states[k] - problem.x_goal) for k in range(N)])
    r = np.stack([R[k] @ problem.nominal_controls[k] for k in range(N - 1)])
    A = np.zeros((N - 1, nx, nx))
    B = np.zeros((N - 1, nx, nu))
    c = np.zeros((N, nx))
    c[0] = problem.nominal_states[0] - problem.x_start
    for k in range(N - 1):
        xk, uk = problem.nominal_states[k], problem.nominal_controls[k]
        A[k], B[k] = discretize(dyn, xk, uk, problem.h)
        c[k + 1] = problem.nominal_states[k + 1] - euler_step(dyn, xk, uk, problem.h)
    return TrajoptLinearization(Q=Q, R=R, q=q, r=r, A=A, B=B, c=BlockVector(c))


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    """One (problem, preconditioner) experiment row."""

    problem: str
    preconditioner: str
    n: int
    m: int
    condition_number: float | None
    normalized_condition: float | None
    pcg_iterations: int | None
    converged: bool | None
    tol: float
    lambda_min: float | None
    lambda_max: float | None
    eigenvalues: tuple[float, ...] | None = field(repr=False, default=None)

    def csv_row(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, float):
                return repr(v)
            return str(v)
        return ",".join(fmt(v) for v in (
            self.problem, self.preconditioner, self.n, self.m,
            self.condition_number, self.normalized_condition,
            self.pcg_iterations, self.converged, self.tol,
            self.lambda_min, self.lambda_max,
        ))


def run_experiment(
    problem: BenchmarkProblem,
    kinds: list[PreconditionerKind],
    cfg: PcgConfig | None = None,
    spectrum_only: bool = False,
) -> list[ExperimentRecord]:
    """Build the multiplier system once, then compare the given preconditioners.

    For each kind: build it, compute the preconditioned spectrum, run PCG
    (skipped in ``spectrum_only`` mode) and emit one record. The jacobi kind
    is always evaluated so condition numbers can be normalized against it;
    non-symmetric (polynomial) kinds are only allowed in spectrum-only mode,
    where just their spectral radius is reported.
    """
    cfg = cfg or PcgConfig()
    if any(k.is_polynomial for k in kinds) and not spectrum_only:
        raise ValueError(
            "polynomial preconditioners are not symmetric; run them in spectrum-only mode"
        )
    ordered = list(kinds)
    if JACOBI not in ordered:
        ordered.insert(0, JACOBI)

    try:
        system = build_schur(linearize_problem(problem))
    except StairsolveError as exc:
        raise type(exc)(f"{problem.name}: {exc}") from exc
    S, gamma = system.S, system.gamma

    jacobi_cond: float | None = None
    records: list[ExperimentRecord] = []
    for kind in ordered:
        try:
            op = build_preconditioner(S, kind)
        except StairsolveError as exc:
            raise type(exc)(f"{problem.name}/{kind.label}: {exc}") from exc
        if kind.is_polynomial:
            radius = power_iteration_radius(
                lambda v: op.apply(S.matvec(BlockVector(v.reshape(S.n, S.m)))).as_array(),
                S.dim,
            )
            records.append(ExperimentRecord(
                problem.name, kind.label, S.n, S.m,
                None, None, None, None, cfg.tol, None, radius, None,
            ))
            continue
        try:
            report = preconditioned_spectrum(S, op)
            if spectrum_only:
                iterations, converged = None, None
            else:
                solve = pcg_solve(S, gamma, op, cfg)
                iterations, converged = solve.iterations, solve.converged
        except StairsolveError as exc:
            raise type(exc)(f"{problem.name}/{kind.label}: {exc}") from exc
        if kind == JACOBI:
            jacobi_cond = report.condition_number
            normalized = 1.0
        elif jacobi_cond and report.condition_number is not None:
            normalized = report.condition_number / jacobi_cond
        else:
            normalized = None
        records.append(ExperimentRecord(
            problem.name, kind.label, S.n, S.m,
            report.condition_number, normalized,
            iterations, converged, cfg.tol,
            report.lambda_min, report.lambda_max,
            report.eigenvalues,
        ))
    return records


def records_to_csv(records: list[ExperimentRecord]) -> str:
    """Experiment records as CSV text with the fixed header."""
    return "\n".join([CSV_HEADER] + [rec.csv_row() for rec in records]) + "\n"


def records_to_spectrum_csv(records: list[ExperimentRecord]) -> str:
    """Eigenvalue rows ``problem,preconditioner,index,eigenvalue`` for all
    records that carry a spectrum."""
    lines = ["problem,preconditioner,index,eigenvalue"]
    for rec in records:
        if rec.eigenvalues is None:
            continue
        lines += spectrum_csv_rows(rec.problem, rec.preconditioner, rec.eigenvalues)
    return "\n".join(lines) + "\n"
