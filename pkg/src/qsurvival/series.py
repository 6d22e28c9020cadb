"""Shared time-series container for survival probability curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Survival values may exceed 1 by at most this much (floating round-off).
UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class SurvivalSeries:
    """Survival probability sampled on a time grid.

    Attributes
    ----------
    times, values : ndarray
        Equal-length 1-D arrays; ``values[k]`` is the probability at
        ``times[k]`` and must lie in ``[0, 1 + UNITARITY_TOL]``.
    model, method : str
        Provenance tags (which Hamiltonian family, which evaluation route).
    seed : int or None
        Seed of the realization the curve belongs to, if any.
    """

    times: np.ndarray
    values: np.ndarray
    model: str = ""
    method: str = ""
    seed: int | None = None

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.times, dtype=float))
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if v.size and (v.min() < -UNITARITY_TOL or v.max() > 1.0 + UNITARITY_TOL):
            raise ValueError(
                f"survival values outside [0, 1] beyond tolerance: "
                f"min={v.min():.3e}, max={v.max():.6e}"
            )
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.times.size
