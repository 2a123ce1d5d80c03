"""Capsule and loudspeaker array geometries and the .geom text format.

A geometry file is line-oriented text::

    # optional comments
    role capsule-array
    radius_m 0.042
    element <elevation_rad> <azimuth_rad> <weight>
    ...

Shipped fixtures (``ambicomp.data``): ``em32.geom`` (32-capsule rigid
sphere with least-squares quadrature weights), ``tdesign_order6.geom``
(equal-weight strength-6 design) and ``lebedev50.geom`` (50-node grid with
exact degree-11 weights, also used as the loudspeaker layout).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

ROLES = ("capsule-array", "loudspeaker-array")

# Relative tolerance on sum(weights) == 4*pi for capsule arrays.
_WEIGHT_SUM_RTOL = 1e-6


class GeometryRoleError(ValueError):
    """Operation applied to a geometry with the wrong role."""


class UndersampledArrayError(ValueError):
    """Too few elements for the requested spherical-harmonic order."""


@dataclass(frozen=True)
class ArrayGeometry:
    """Directions, radius and quadrature weights of a spherical array.

    Parameters
    ----------
    role : str
        Either ``capsule-array`` or ``loudspeaker-array``.
    radius : float
        Sphere radius in meters (capsule radius r_e or loudspeaker radius R).
    theta, phi : ndarray, shape (Q,)
        Element elevations (from +z) and azimuths in radians.
    weights : ndarray, shape (Q,)
        Non-negative quadrature weights; for capsule arrays they sum to
        4*pi within 1e-6 relative.
    """

    role: str
    radius: float
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.role not in ROLES:
            raise GeometryRoleError(f"unknown geometry role {self.role!r}")
        if self.radius <= 0.0:
            raise ValueError("array radius must be positive")
        theta = np.asarray(self.theta, dtype=float)
        phi = np.mod(np.asarray(self.phi, dtype=float), 2.0 * np.pi)
        weights = np.asarray(self.weights, dtype=float)
        if not (theta.shape == phi.shape == weights.shape) or theta.ndim != 1:
            raise ValueError("theta, phi and weights must be 1-d and equal length")
        if np.any(theta < 0.0) or np.any(theta > np.pi):
            raise ValueError("elevations must lie in [0, pi]")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0.0):
            raise ValueError("weights must be finite and non-negative")
        if self.role == "capsule-array":
            total = weights.sum()
            if abs(total - 4.0 * np.pi) > _WEIGHT_SUM_RTOL * 4.0 * np.pi:
                raise ValueError(
                    f"capsule weights must sum to 4*pi, got {total:.9f}"
                )
        for arr in (theta, phi, weights):
            arr.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "weights", weights)

    @property
    def count(self) -> int:
        return self.theta.size

    def unit_vectors(self) -> np.ndarray:
        """Element unit vectors, shape (Q, 3)."""
        st = np.sin(self.theta)
        return np.column_stack(
            (st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta))
        )


def write_geometry(geometry: ArrayGeometry, path) -> None:
    lines = [f"role {geometry.role}", f"radius_m {float(geometry.radius)!r}"]
    for t, p, w in zip(geometry.theta, geometry.phi, geometry.weights):
        lines.append(f"element {float(t)!r} {float(p)!r} {float(w)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_geometry(text: str, name: str) -> ArrayGeometry:
    role = None
    radius = None
    theta, phi, weights = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if fields[0] == "role":
                role = fields[1]
            elif fields[0] == "radius_m":
                radius = float(fields[1])
            elif fields[0] == "element":
                theta.append(float(fields[1]))
                phi.append(float(fields[2]))
                weights.append(float(fields[3]))
            else:
                raise ValueError(f"unknown keyword {fields[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{name}:{lineno}: malformed geometry line: {exc}")
    if role is None or radius is None or not theta:
        raise ValueError(f"{name}: geometry file is missing role, radius or elements")
    return ArrayGeometry(
        role, radius, np.array(theta), np.array(phi), np.array(weights)
    )


def read_geometry(path) -> ArrayGeometry:
    path = Path(path)
    return _parse_geometry(path.read_text(), str(path))


def load_fixture(name: str) -> ArrayGeometry:
    """Load one of the shipped geometry fixtures by file name."""
    text = resources.files("ambicomp.data").joinpath(name).read_text()
    return _parse_geometry(text, name)


def fit_quadrature_weights(theta, phi, max_order: int) -> np.ndarray:
    """Least-squares weights maximizing SH orthonormality on a point set.

    Solves min_w sum_{a,b} (sum_q w_q Y_a(q) Y_b(q) - delta_ab)^2 over all
    index pairs up to ``max_order``, then rescales so the weights sum to
    4*pi.  Used to derive capsule weights for measured layouts whose exact
    quadrature rule is not published.
    """
    from .spherical import num_channels, sh_matrix

    y = sh_matrix(max_order, theta, phi)
    n_ch = num_channels(max_order)
    design = np.einsum("qa,qb->abq", y, y).reshape(n_ch * n_ch, -1)
    target = np.eye(n_ch).reshape(-1)
    weights, *_ = np.linalg.lstsq(design, target, rcond=None)
    if np.any(weights < 0.0):
        raise ValueError("least-squares weights came out negative; layout too sparse")
    return weights * (4.0 * np.pi / weights.sum())


def with_role(geometry: ArrayGeometry, role: str, radius: float) -> ArrayGeometry:
    """Copy of a geometry reinterpreted with a different role and radius."""
    return ArrayGeometry(role, radius, geometry.theta, geometry.phi, geometry.weights)
