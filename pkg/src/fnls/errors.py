"""Exception types shared across the package.

Exit-code mapping used by the CLI: ParameterError means a bad configuration
or argument (exit 2); the divergence and tracking errors mean a numerical
failure at runtime (exit 3).
"""

from __future__ import annotations


class FnlsError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FnlsError, ValueError):
    """A parameter or configuration value violates a precondition.

    The message names the offending field or inequality.
    """


class StageDivergenceError(FnlsError, RuntimeError):
    """The fixed-point iteration of an implicit midpoint stage failed to
    converge within the iteration cap.

    Attributes
    ----------
    stage_index : int
        1-based index of the failing stage within the composition step.
    iterations : int
        Number of iterations performed.
    residual : float
        Last relative successive-difference norm.
    step_index : int or None
        Step number within an evolve run, filled in by the driver.
    time : float or None
        Simulation time at the start of the failing step.
    """

    def __init__(self, stage_index: int, iterations: int, residual: float):
        self.stage_index = stage_index
        self.iterations = iterations
        self.residual = residual
        self.step_index: int | None = None
        self.time: float | None = None
        super().__init__(
            f"fixed-point stage solve diverged at stage {stage_index}: "
            f"residual {residual:.3e} after {iterations} iterations"
        )

    def annotate(self, step_index: int, time: float) -> None:
        # Called by evolve so CLI messages can report where the run failed.
        self.step_index = step_index
        self.time = time
        self.args = (
            f"{self.args[0]} (step {step_index}, t = {time:.6g})",
        )

    def __reduce__(self):
        # The message-only default would not match __init__'s signature.
        return (
            _rebuild_stage_divergence,
            (self.stage_index, self.iterations, self.residual,
             self.step_index, self.time),
        )


def _rebuild_stage_divergence(stage_index, iterations, residual,
                              step_index, time):
    err = StageDivergenceError(stage_index, iterations, residual)
    if step_index is not None:
        err.annotate(step_index, time)
    return err


class ProfileDivergenceError(FnlsError, RuntimeError):
    """Petviashvili iteration failed to reach the requested tolerance."""

    def __init__(self, iterations: int, residual_history: list[float]):
        self.iterations = iterations
        self.residual_history = residual_history
        last = residual_history[-1] if residual_history else float("nan")
        super().__init__(
            f"Petviashvili iteration did not converge after {iterations} "
            f"iterations (last residual {last:.3e})"
        )

    def __reduce__(self):
        return (ProfileDivergenceError, (self.iterations, self.residual_history))


class TrackingError(FnlsError, RuntimeError):
    """Wave tracking could not locate a unique peak."""


class ConvergenceStudyError(FnlsError, RuntimeError):
    """A row of a convergence study failed; carries the completed rows.

    Attributes
    ----------
    failed_dt : float
        The step size of the failing row.
    partial_rows : list
        ConvergenceRow results completed before the failure, in dt order.
    """

    def __init__(self, failed_dt: float, partial_rows: list, cause: Exception):
        self.failed_dt = failed_dt
        self.partial_rows = partial_rows
        self.__cause__ = cause
        super().__init__(
            f"convergence study aborted: run with dt = {failed_dt:g} failed "
            f"({cause}); {len(partial_rows)} completed row(s) retained"
        )

    def __reduce__(self):
        return (
            ConvergenceStudyError,
            (self.failed_dt, self.partial_rows, self.__cause__),
        )
