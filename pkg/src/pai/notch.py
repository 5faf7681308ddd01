"""Discrete grids of allowed rotation angles ("notches") on the circle.

A grid is a cyclic, sorted set of channel angles in ``[0, 2*pi)``.  The
common case is the uniform grid of a B-bit angle register, ``2**B`` notches
spaced ``2*pi / 2**B`` apart; explicit non-uniform grids are supported as
long as every gap is at most ``pi/2``, which keeps the three-point
decomposition used elsewhere well conditioned.

Angle bookkeeping rules, applied consistently everywhere:

* targets are reduced into ``[0, 2*pi)`` first;
* an offset within ``1e-12`` of either enclosing notch snaps onto that
  notch (fraction exactly 0);
* rounding to the nearest notch sends a fraction of exactly 0.5 (within
  ``1e-12``) up to the higher notch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "TWO_PI",
    "SNAP_TOL",
    "AnglePosition",
    "NotchGrid",
    "locate",
    "nearest_notch",
    "antipolar_notch",
]

TWO_PI = 2.0 * np.pi
SNAP_TOL = 1e-12
_TIE_TOL = 1e-12
_MAX_SPACING = np.pi / 2 + 1e-12


@dataclass(frozen=True)
class AnglePosition:
    """Where a target angle falls on a grid.

    ``k`` indexes the notch at or below the target, ``theta`` is the offset
    above that notch (0 when snapped), ``lam = theta / delta_k`` is the
    fractional position in the enclosing interval and ``delta_k`` the
    interval width.
    """

    k: int
    theta: float
    lam: float
    delta_k: float


class NotchGrid:
    """Cyclic grid of allowed channel angles; construct via :meth:`uniform`,
    :meth:`explicit` or :meth:`from_json`."""

    __slots__ = ("_bits", "_delta", "_angles", "_size")

    def __init__(self, *, bits: int | None, angles: np.ndarray | None) -> None:
        self._bits = bits
        self._angles = angles
        if bits is not None:
            self._size = 1 << bits
            self._delta = TWO_PI / self._size
        else:
            assert angles is not None
            self._size = angles.shape[0]
            self._delta = None

    @classmethod
    def uniform(cls, bits: int) -> "NotchGrid":
        """Equally spaced grid with ``2**bits`` notches (``bits >= 2``)."""
        bits = int(bits)
        if not 2 <= bits <= 30:
            raise ValueError("bits must be an integer in [2, 30]")
        return cls(bits=bits, angles=None)

    @classmethod
    def explicit(cls, angles) -> "NotchGrid":
        """Grid from a sorted list of angles in ``[0, 2*pi)``.

        Requires at least 4 notches, strictly increasing, with every gap
        (including the wrap-around gap) positive and at most ``pi/2``.
        """
        arr = np.asarray(angles, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] < 4:
            raise ValueError("explicit grid needs at least 4 angles")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid angles must be finite")
        if arr[0] < 0.0 or arr[-1] >= TWO_PI:
            raise ValueError("grid angles must lie in [0, 2*pi)")
        gaps = np.diff(arr)
        wrap = arr[0] + TWO_PI - arr[-1]
        if np.any(gaps <= 0.0):
            raise ValueError("grid angles must be strictly increasing")
        if np.any(gaps > _MAX_SPACING) or wrap > _MAX_SPACING or wrap <= 0.0:
            raise ValueError("every notch spacing must be in (0, pi/2]")
        return cls(bits=None, angles=arr.copy())

    @classmethod
    def from_json(cls, path: str | Path) -> "NotchGrid":
        """Load an explicit grid from a JSON file: either a bare list of
        angles or an object with an ``"angles"`` key."""
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            if "angles" not in data:
                raise ValueError("grid file object must contain an 'angles' key")
            data = data["angles"]
        if not isinstance(data, list):
            raise ValueError("grid file must hold a list of angles")
        return cls.explicit(data)

    @property
    def is_uniform(self) -> bool:
        return self._bits is not None

    @property
    def bits(self) -> int | None:
        return self._bits

    @property
    def size(self) -> int:
        return self._size

    def __len__(self) -> int:
        return self._size

    @property
    def delta_max(self) -> float:
        """Largest gap between adjacent notches."""
        if self._bits is not None:
            return self._delta
        gaps = np.diff(self._angles)
        wrap = self._angles[0] + TWO_PI - self._angles[-1]
        return float(max(gaps.max(), wrap))

    def angle(self, k: int) -> float:
        """Angle of notch ``k`` (indices taken mod the grid size)."""
        k = int(k) % self._size
        if self._bits is not None:
            return k * self._delta
        return float(self._angles[k])

    def spacing(self, k: int) -> float:
        """Gap between notch ``k`` and notch ``k + 1`` (cyclic)."""
        k = int(k) % self._size
        if self._bits is not None:
            return self._delta
        if k == self._size - 1:
            return float(self._angles[0] + TWO_PI - self._angles[-1])
        return float(self._angles[k + 1] - self._angles[k])

    def angles_array(self) -> np.ndarray:
        """All notch angles as an array (materialized for uniform grids)."""
        if self._bits is not None:
            return np.arange(self._size) * self._delta
        return self._angles.copy()


def locate(grid: NotchGrid, target_angle: float) -> AnglePosition:
    """Reduce ``target_angle`` mod ``2*pi`` and express it as notch ``k``
    plus offset ``theta``, snapping offsets within ``SNAP_TOL`` of a notch."""
    x = float(target_angle)
    if not np.isfinite(x):
        raise ValueError("target angle must be finite")
    x = x % TWO_PI
    if x >= TWO_PI:  # tiny negative inputs can reduce to exactly 2*pi
        x = 0.0
    size = grid.size
    if grid.is_uniform:
        delta = grid._delta
        k = int(x / delta)
        if k >= size:
            k = size - 1
        theta = x - k * delta
    else:
        angles = grid._angles
        idx = int(np.searchsorted(angles, x, side="right")) - 1
        if idx < 0:
            k = size - 1
            theta = x + TWO_PI - angles[k]
        else:
            k = idx
            theta = x - angles[k]
    delta_k = grid.spacing(k)
    if theta < SNAP_TOL:
        theta = 0.0
    elif delta_k - theta < SNAP_TOL:
        k = (k + 1) % size
        theta = 0.0
        delta_k = grid.spacing(k)
    lam = theta / delta_k
    return AnglePosition(k=k, theta=theta, lam=lam, delta_k=delta_k)


def nearest_notch(grid: NotchGrid, target_angle: float) -> int:
    """Index of the notch nearest to ``target_angle`` by fractional
    position; a fraction of exactly one half rounds up."""
    pos = locate(grid, target_angle)
    if pos.lam >= 0.5 - _TIE_TOL:
        return (pos.k + 1) % grid.size
    return pos.k


def antipolar_notch(grid: NotchGrid, k: int) -> int:
    """Index of the notch nearest to ``angle(k) + pi``.

    Exact for uniform grids, where it is ``k + size/2`` (mod size).
    """
    size = grid.size
    k = int(k)
    if not 0 <= k < size:
        raise ValueError(f"notch index {k} outside [0, {size})")
    if grid.is_uniform:
        return (k + size // 2) % size
    return nearest_notch(grid, grid.angle(k) + np.pi)
