"""Uniform-mesh midpoint collocation grids on (0, 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Grid:
    M: int
    points: tuple

    def array(self, dtype=float) -> np.ndarray:
        """Points as an array; exact in any binary float type."""
        l = np.arange(self.M, dtype=dtype)
        return (2 * l + 1) / np.asarray(2 * self.M, dtype=dtype)

    def __len__(self):
        return self.M


def collocation_points(M: int) -> Grid:
    """Midpoints of the M cells of the mesh ``l/M``, ``l = 0..M``.

    Gives one equation per unknown coefficient and never touches t = 0.
    """
    M = int(M)
    if M < 1:
        raise DomainError(f"need at least one collocation point, got M={M}")
    return Grid(M, tuple(((2 * l + 1) / (2 * M)) for l in range(M)))
