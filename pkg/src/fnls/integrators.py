"""Symmetric composition time integrators for the semidiscrete system.

One step of length k chains q implicit midpoint substeps of lengths
b_1 k, ..., b_q k:

    Y_0 = U_n;  Y_j = Y_{j-1} + k b_j F((Y_j + Y_{j-1}) / 2);  U_{n+1} = Y_q.

The coefficients come from Yoshida's triple-jump recursion, giving order
2p with q = 3^(p-1) stages.  Each implicit stage is solved by the
preconditioned fixed-point iteration

    X_{n+1} = A^{-1} ( Y_prev + i (k b_j / 2) P(|X_n|^2 X_n) ),
    A = I + i (k b_j / 2) (-d_xx)^s,

with A inverted exactly mode by mode, and X* the midpoint so that
Y_next = 2 X* - Y_prev.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, StageDivergenceError
from .model import ModelParams
from .spectral import Field, SpectralGrid

__all__ = [
    "CompositionScheme",
    "exact_step_count",
    "SolverParams",
    "StepReport",
    "RunStats",
    "yoshida_coefficients",
    "imr_stage_solve",
    "step",
    "evolve",
]


@dataclass(frozen=True)
class CompositionScheme:
    """Stage coefficients b_1..b_q of a composition method of order 2p."""

    p: int
    q: int
    b: tuple[float, ...]
    order: int

    def __post_init__(self):
        if len(self.b) != self.q:
            raise ParameterError(
                f"scheme has q = {self.q} but {len(self.b)} coefficients"
            )
        if any(bj == 0.0 for bj in self.b):
            raise ParameterError("stage coefficients must be nonzero")


def yoshida_coefficients(p: int) -> CompositionScheme:
    """Triple-jump coefficients for the level-p composition of the IMR.

    p = 1 is the implicit midpoint rule itself (b = [1], order 2).  Each
    further level wraps the previous sequence c as [w1 c, w0 c, w1 c] with
    w1 = 1 / (2 - 2^(1/(2p-1))) and w0 = 1 - 2 w1, tripling the stage
    count and raising the order by two.
    """
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ParameterError(f"composition level p must be a positive integer, got {p!r}")
    b = [1.0]
    for level in range(2, p + 1):
        w1 = 1.0 / (2.0 - 2.0 ** (1.0 / (2 * level - 1)))
        w0 = 1.0 - 2.0 * w1
        b = [w1 * c for c in b] + [w0 * c for c in b] + [w1 * c for c in b]
    return CompositionScheme(p=int(p), q=3 ** (int(p) - 1), b=tuple(b), order=2 * int(p))


@dataclass(frozen=True)
class SolverParams:
    """Time step and fixed-point solver controls.

    k may be negative (backward step) for reversibility checks; evolve
    itself only accepts forward runs.
    """

    k: float
    fp_tol: float = 1e-13
    fp_max_iters: int = 200
    stability_check: bool = True

    def __post_init__(self):
        if self.k == 0.0 or not math.isfinite(self.k):
            raise ParameterError(f"time step k must be nonzero and finite, got {self.k!r}")
        if not self.fp_tol > 0.0:
            raise ParameterError(f"fp_tol must be positive, got {self.fp_tol!r}")
        if self.fp_max_iters < 1:
            raise ParameterError(f"fp_max_iters must be >= 1, got {self.fp_max_iters!r}")


@dataclass
class StepReport:
    """Per-step solver diagnostics."""

    fp_iterations_per_stage: list[int]
    stability_margin: float
    warnings: list[str] = field(default_factory=list)


@dataclass
class RunStats:
    """Aggregated diagnostics of an evolve run."""

    steps: int
    mean_fp_iterations: float
    max_stability_margin: float
    initial_stability_margin: float
    warnings: list[str] = field(default_factory=list)


class _StepContext:
    """Arrays precomputed once per (grid, coefficients, solver, model)."""

    def __init__(self, grid: SpectralGrid, b: tuple[float, ...],
                 sp: SolverParams, mp: ModelParams):
        self.grid = grid
        self.sp = sp
        self.mp = mp
        lam = grid.fractional_symbol(mp.s)
        self.half_steps = [0.5 * sp.k * bj for bj in b]
        self.precond = [1.0 / (1.0 + 1j * hk * lam) for hk in self.half_steps]
        self.mask = grid.dealias_mask if mp.dealias else None
        self.max_abs_b = max(abs(bj) for bj in b)

    def stability_margin(self, u_vals: np.ndarray) -> float:
        # 3 R^2 k N max|b_j| with R the discrete L2 norm of the current state.
        r_sq = self.grid.h * float(np.sum(np.abs(u_vals) ** 2))
        return 3.0 * r_sq * abs(self.sp.k) * self.grid.N * self.max_abs_b


def _stage_solve(ctx: _StepContext, stage_index: int,
                 y_vals: np.ndarray, y_hat: np.ndarray):
    """Solve one midpoint stage; returns (y_next_vals, y_next_hat, iters)."""
    sp, mp = ctx.sp, ctx.mp
    hk = ctx.half_steps[stage_index - 1]
    pre = ctx.precond[stage_index - 1]
    x_vals = y_vals
    diff = norm = 0.0
    # diverging iterates may overflow before the cap trips; that is the
    # expected failure route, not a condition worth a numpy warning
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, sp.fp_max_iters + 1):
            if mp.linear:
                rhs_hat = y_hat
            else:
                g_hat = np.fft.fft(np.abs(x_vals) ** 2 * x_vals)
                if ctx.mask is not None:
                    g_hat = g_hat * ctx.mask
                rhs_hat = y_hat + (1j * hk) * g_hat
            x_hat = pre * rhs_hat
            x_new = np.fft.ifft(x_hat)
            diff = float(np.linalg.norm(x_new - x_vals))
            norm = float(np.linalg.norm(x_new))
            x_vals = x_new
            if not math.isfinite(norm):
                # overflow: bail out now, the tolerance test would be
                # vacuous (inf <= fp_tol * inf)
                raise StageDivergenceError(stage_index, it, math.inf)
            if diff <= sp.fp_tol * norm:
                return 2.0 * x_vals - y_vals, 2.0 * x_hat - y_hat, it
    residual = diff / norm if norm > 0.0 else math.inf
    raise StageDivergenceError(stage_index, sp.fp_max_iters, residual)


def _step_arrays(ctx: _StepContext, u_vals: np.ndarray, u_hat: np.ndarray):
    """One full composition step on raw arrays."""
    report = StepReport(fp_iterations_per_stage=[], stability_margin=math.nan)
    if ctx.sp.stability_check:
        margin = ctx.stability_margin(u_vals)
        report.stability_margin = margin
        if margin >= 1.0:
            report.warnings.append(
                f"stability margin {margin:.3g} >= 1: stage fixed points "
                "may be non-unique"
            )
    y_vals, y_hat = u_vals, u_hat
    for j in range(1, len(ctx.half_steps) + 1):
        y_vals, y_hat, iters = _stage_solve(ctx, j, y_vals, y_hat)
        report.fp_iterations_per_stage.append(iters)
    return y_vals, y_hat, report


def imr_stage_solve(Y_prev: Field, b_j: float, sp: SolverParams,
                    mp: ModelParams) -> tuple[Field, int]:
    """Single implicit midpoint substep of length k b_j."""
    if b_j == 0.0:
        raise ParameterError("stage coefficient b_j must be nonzero")
    ctx = _StepContext(Y_prev.grid, (float(b_j),), sp, mp)
    y_vals = Y_prev.values
    y_next, _, iters = _stage_solve(ctx, 1, y_vals, np.fft.fft(y_vals))
    return Field(y_next, Y_prev.grid), iters


def step(U_n: Field, scheme: CompositionScheme, sp: SolverParams,
         mp: ModelParams) -> tuple[Field, StepReport]:
    """Advance one composition step of length k."""
    ctx = _StepContext(U_n.grid, scheme.b, sp, mp)
    u_vals = U_n.values
    y_vals, _, report = _step_arrays(ctx, u_vals, np.fft.fft(u_vals))
    return Field(y_vals, U_n.grid), report


def exact_step_count(T: float, k: float) -> int:
    """Step count M = T/k, required to be a positive integer to 0.5 ulp.

    Mismatches are rejected rather than silently rounding k: convergence
    studies rely on exact step counts.
    """
    ratio = T / k
    M = round(ratio)
    if M < 1 or abs(ratio - M) > 0.5 * math.ulp(abs(ratio)):
        raise ParameterError(
            f"T/k = {ratio!r} is not a positive integer step count; "
            "choose k dividing T exactly"
        )
    return M


def evolve(U0: Field, T: float, scheme: CompositionScheme, sp: SolverParams,
           mp: ModelParams, observers: tuple = ()) -> tuple[Field, RunStats]:
    """Run M = T/k composition steps from U0.

    Observers are callables invoked as observer(step_index, t, field) at
    step 0 and after every step whose index is a multiple of their
    ``stride`` attribute (default 1).  The loop itself is strictly
    sequential and deterministic.
    """
    if not T > 0.0:
        raise ParameterError(f"final time T must be positive, got {T!r}")
    M = exact_step_count(T, sp.k)
    grid = U0.grid
    ctx = _StepContext(grid, scheme.b, sp, mp)
    strides = [max(1, int(getattr(obs, "stride", 1))) for obs in observers]

    u_vals = U0.values
    u_hat = np.fft.fft(u_vals)
    for obs in observers:
        obs(0, 0.0, U0)

    initial_margin = ctx.stability_margin(u_vals)
    max_margin = math.nan if not sp.stability_check else -math.inf
    total_iters = 0
    flagged = 0
    for n in range(1, M + 1):
        try:
            u_vals, u_hat, report = _step_arrays(ctx, u_vals, u_hat)
        except StageDivergenceError as err:
            err.annotate(step_index=n, time=(n - 1) * sp.k)
            raise
        total_iters += sum(report.fp_iterations_per_stage)
        if sp.stability_check:
            max_margin = max(max_margin, report.stability_margin)
            if report.warnings:
                flagged += 1
        if any(n % stride == 0 for stride in strides):
            field_n = Field(u_vals, grid)
            t_n = n * sp.k
            for obs, stride in zip(observers, strides):
                if n % stride == 0:
                    obs(n, t_n, field_n)

    warnings = []
    if flagged:
        warnings.append(
            f"stability margin >= 1 on {flagged} of {M} steps "
            f"(max {max_margin:.3g})"
        )
    stats = RunStats(
        steps=M,
        mean_fp_iterations=total_iters / (M * len(scheme.b)),
        max_stability_margin=max_margin,
        initial_stability_margin=initial_margin,
        warnings=warnings,
    )
    return Field(u_vals, grid), stats
