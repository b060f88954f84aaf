"""Disks, polydisk parameter boxes, and deterministic sampling on them.

Sampling uses scrambled Halton sequences, so the first ``n`` points of a
request for ``2n`` points coincide with a request for ``n`` points under the
same seed.  The doubling tests in :mod:`bautinkit.bautin` rely on that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .errors import ConfigurationError

_CONTAIN_RTOL = 1e-12


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigurationError(f"disk radius must be positive, got {self.radius}")

    def boundary(self, n: int, offset: float = 0.0) -> np.ndarray:
        theta = offset + 2 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)


@dataclass(frozen=True)
class ParameterBox:
    """Product of closed disks in C^n.

    A zero radius is allowed and denotes a point coordinate, so that a
    compact ``K = {lambda_0}`` can be written down directly.
    """

    centers: tuple
    radii: tuple

    def __post_init__(self):
        centers = tuple(complex(c) for c in self.centers)
        radii = tuple(float(r) for r in self.radii)
        if len(centers) != len(radii) or not centers:
            raise ConfigurationError("box needs equally many centers and radii (>= 1)")
        if any(not np.isfinite(r) or r < 0 for r in radii):
            raise ConfigurationError(f"box radii must be finite and >= 0: {radii}")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)

    @classmethod
    def ball(cls, dimension: int, radius: float, center: complex | Sequence[complex] = 0j):
        if np.ndim(center) == 0:
            center = [center] * dimension
        return cls(tuple(center), (radius,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.centers)

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.centers, dtype=complex)

    @property
    def radius_array(self) -> np.ndarray:
        return np.array(self.radii, dtype=float)

    def bounds(self) -> np.ndarray:
        """Per-coordinate bound on |lambda_i| over the box."""
        return np.abs(self.center_array) + self.radius_array

    def scaled(self, factor: float) -> "ParameterBox":
        return ParameterBox(self.centers, tuple(r * factor for r in self.radii))

    def contains(self, lam) -> bool | np.ndarray:
        """Closed containment; works on one point or a batch of shape (S, n)."""
        lam = np.asarray(lam, dtype=complex)
        dist = np.abs(lam - self.center_array)
        return (dist <= self.radius_array * (1 + _CONTAIN_RTOL)).all(axis=-1)

    def contains_box(self, other: "ParameterBox", strict: bool = True) -> bool:
        """Whether ``other`` sits inside this box (compactly, if ``strict``)."""
        if other.dimension != self.dimension:
            return False
        reach = np.abs(other.center_array - self.center_array) + other.radius_array
        if strict:
            return bool(np.all(reach < self.radius_array))
        return bool(np.all(reach <= self.radius_array * (1 + _CONTAIN_RTOL)))

    def to_dict(self) -> dict:
        return {
            "centers": [[c.real, c.imag] for c in self.centers],
            "radii": list(self.radii),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParameterBox":
        try:
            centers = [_parse_complex(c) for c in data["centers"]]
            return cls(tuple(centers), tuple(data["radii"]))
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"bad box specification {data!r}") from exc


def _parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def check_nesting(*boxes: ParameterBox) -> None:
    """Raise unless each box is compactly contained in the next one."""
    for inner, outer in zip(boxes, boxes[1:]):
        if not outer.contains_box(inner, strict=True):
            raise ConfigurationError(
                f"box nesting violated: {inner.to_dict()} not inside {outer.to_dict()}"
            )


def halton(n: int, dim: int, seed: int) -> np.ndarray:
    if n <= 0:
        raise ConfigurationError("sample count must be positive")
    return qmc.Halton(d=dim, scramble=True, seed=seed).random(n)


def sample_boundary(box: ParameterBox, n: int, seed: int = 0, torus_fraction: float = 0.5):
    """Boundary-biased points: about ``torus_fraction`` of them on the torus.

    Extrema of holomorphic functions on a polydisk sit on the distinguished
    boundary, so the torus gets a large share; the rest are area-uniform.
    """
    dim = box.dimension
    u = halton(n, 2 * dim, seed)
    scale = np.sqrt(u[:, :dim] / (1.0 - torus_fraction))
    rho = box.radius_array * np.minimum(1.0, scale)
    theta = 2 * np.pi * u[:, dim:]
    return box.center_array + rho * np.exp(1j * theta)


def sample_central(box: ParameterBox, n: int, seed: int = 0, depth: float = 12.0):
    """Points log-uniformly close to the box center, per coordinate.

    Coordinate ``i`` has modulus offset ``radius_i * 10**(-depth * u)``;
    coordinates shrink independently, which is what exposes the regions
    near a central set where one coefficient dominates the others.
    """
    dim = box.dimension
    u = halton(n, 2 * dim, seed + 7919)
    rho = box.radius_array * 10.0 ** (-depth * u[:, :dim])
    theta = 2 * np.pi * u[:, dim:]
    return box.center_array + rho * np.exp(1j * theta)


def sample_mixed(box: ParameterBox, n: int, seed: int = 0, depth: float = 12.0):
    """Interleave boundary and central streams (even/odd indices).

    Prefix-stable: ``sample_mixed(b, n)`` equals ``sample_mixed(b, 2n)[:n]``.
    """
    n_b = (n + 1) // 2
    n_c = n // 2
    out = np.empty((n, box.dimension), dtype=complex)
    out[0::2] = sample_boundary(box, n_b, seed)
    if n_c:
        out[1::2] = sample_central(box, n_c, seed, depth)
    return out
