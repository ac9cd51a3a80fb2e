"""Componentwise box constraints on the control."""

import numpy as np


class ControlBox:
    """Admissible control set ``{u : lower <= u <= upper}``.

    Parameters
    ----------
    lower, upper : array_like
        Per-component bounds.  Must satisfy ``lower < upper`` strictly in
        every component.
    """

    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise ValueError("box bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("box requires lower < upper componentwise")
        self.lower = lower
        self.upper = upper

    @property
    def dim(self):
        return self.lower.size

    def diameter(self):
        """Euclidean length of the box diagonal ``|upper - lower|``."""
        return float(np.linalg.norm(self.upper - self.lower))

    def replicate(self, horizon):
        """Tile the box over a prediction horizon of ``horizon`` moves."""
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        return ControlBox(np.tile(self.lower, horizon), np.tile(self.upper, horizon))

    def contains(self, points, atol=0.0):
        """True if every row of ``points`` lies inside the box."""
        pts = np.atleast_2d(points)
        return bool(
            np.all(pts >= self.lower - atol) and np.all(pts <= self.upper + atol)
        )

    def sample_uniform(self, rng, n):
        """Draw ``n`` points uniformly from the box."""
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))

    def __repr__(self):
        return f"ControlBox(lower={self.lower!r}, upper={self.upper!r})"


def project_box(v, box):
    """Componentwise projection (clamp) onto a :class:`ControlBox`.

    Idempotent and non-expansive in the Euclidean norm; the input may be a
    single point or a stack of points in the box's dimension.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != box.dim:
        raise ValueError(f"dimension mismatch: point has {v.shape[-1]}, box has {box.dim}")
    return np.clip(v, box.lower, box.upper)
