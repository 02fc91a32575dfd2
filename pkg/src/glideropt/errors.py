"""Exception types shared across the toolkit.

Plain ``ValueError`` is used for ordinary bad arguments (wrong length,
out-of-range scalar); the classes here mark failures that callers are
expected to catch and handle, e.g. the optimizer treating a degenerate
hull as an infeasible candidate.
"""


class InvalidGeometryError(ValueError):
    """Input mesh violates a geometric precondition (not watertight, zero extent)."""


class DegenerateShapeError(ValueError):
    """A deformation produced a mesh with non-positive signed volume."""


class OutOfEnvelopeError(ValueError):
    """Angle of attack outside the hydrodynamic oracle's validity envelope."""


class GenerationError(RuntimeError):
    """Procedural shape-family generation produced an invalid shape."""


class OptimizationFailedError(RuntimeError):
    """Every restart of a design optimization failed to produce a valid hull."""


class TrainingDivergedError(RuntimeError):
    """Surrogate training hit a non-finite loss."""

    def __init__(self, epoch: int, step: int):
        super().__init__(f"training loss became non-finite at epoch {epoch}, step {step}")
        self.epoch = epoch
        self.step = step
