"""Uniform time grids and the quadrature rules used on them."""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_i = t0 + i*dt`` for ``i = 0 .. count-1`` (units 1/gamma)."""

    t0: float
    dt: float
    count: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"grid spacing must be positive, got dt={self.dt}")
        if self.count < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.count}")
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def span(cls, t0, t1, dt):
        """Grid from ``t0`` to (approximately) ``t1`` inclusive with spacing ``dt``."""
        count = int(round((t1 - t0) / dt)) + 1
        return cls(t0, dt, count)

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.count)

    @property
    def t_end(self):
        return self.t0 + self.dt * (self.count - 1)

    @property
    def duration(self):
        return self.dt * (self.count - 1)

    def same_as(self, other, rtol=1e-9):
        if self.count != other.count:
            return False
        scale = max(abs(self.t0), abs(self.t_end), self.dt)
        return (abs(self.dt - other.dt) <= rtol * self.dt
                and abs(self.t0 - other.t0) <= rtol * scale)

    def require_same(self, other, what="inputs"):
        if not self.same_as(other):
            raise GridMismatchError(f"{what} are sampled on different grids: {self} vs {other}")

    def reversed_about(self, t_mirror):
        """Grid of the mirror points ``2*t_mirror - t`` in increasing order."""
        return TimeGrid(2.0 * t_mirror - self.t_end, self.dt, self.count)

    def as_tuple(self):
        return (self.t0, self.dt, self.count)


def as_grid(grid):
    if isinstance(grid, TimeGrid):
        return grid
    t0, dt, count = grid
    return TimeGrid(t0, dt, count)


def trapezoid(y, dt):
    """Composite trapezoid integral of uniformly sampled ``y``."""
    y = np.asarray(y)
    return dt * (y.sum(axis=-1) - 0.5 * (y[..., 0] + y[..., -1]))


def cumulative_trapezoid(y, dt):
    """Running trapezoid integral, starting at 0 on the first sample."""
    y = np.asarray(y)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * dt * (y[1:] + y[:-1]))
    return out
