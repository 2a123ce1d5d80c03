"""Vector base amplitude panning over a full-sphere loudspeaker layout."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial._qhull import QhullError

from .geometry import ArrayGeometry, GeometryRoleError
from .spherical import Direction

# Barycentric solutions down to this value count as non-negative (hull edges).
_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class VbapGains:
    """Unit-power gain triple for the loudspeaker triangle containing a DOA."""

    triangle: tuple[int, int, int]
    gains: np.ndarray

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float)
        if gains.shape != (3,) or len(set(self.triangle)) != 3:
            raise ValueError("VBAP solution needs 3 distinct loudspeakers and gains")
        if np.any(gains < 0.0):
            raise ValueError("VBAP gains must be non-negative")
        if abs(gains @ gains - 1.0) > 1e-9:
            raise ValueError("VBAP gains must have unit power")
        gains.flags.writeable = False
        object.__setattr__(self, "gains", gains)


def triangulate(layout: ArrayGeometry) -> list[tuple[int, int, int]]:
    """Convex-hull triangulation of the loudspeaker directions.

    Returns sorted vertex-index triples covering the full sphere, ordered
    lexicographically so downstream tie-breaking is reproducible.
    """
    if layout.role != "loudspeaker-array":
        raise GeometryRoleError("triangulation requires a loudspeaker-array")
    if layout.count < 4:
        raise ValueError("need at least 4 loudspeakers to span the sphere")
    try:
        hull = ConvexHull(layout.unit_vectors(), qhull_options="Qt")
    except QhullError as exc:
        raise ValueError(f"degenerate loudspeaker layout: {exc}") from exc
    if hull.vertices.size != layout.count:
        raise ValueError("loudspeaker layout is degenerate (points inside hull)")
    triangles = sorted(tuple(sorted(simplex)) for simplex in hull.simplices)
    return [tuple(int(i) for i in tri) for tri in triangles]


def vbap_gains(
    doa: Direction, layout: ArrayGeometry, normalization: str = "power"
) -> VbapGains:
    """Solve the three-loudspeaker panning gains for ``doa``.

    Scans the hull triangles in index order and accepts the first whose
    base solve is all-non-negative, which also breaks ties between
    triangles sharing an edge through ``doa``.

    Parameters
    ----------
    normalization : str
        ``"power"`` (sum g^2 = 1, default) or ``"amplitude"`` (sum g = 1).
    """
    if normalization not in ("power", "amplitude"):
        raise ValueError(f"unknown VBAP normalization {normalization!r}")
    vectors = layout.unit_vectors()
    target = doa.to_unit_vector()
    for tri in triangulate(layout):
        base = vectors[list(tri)]
        try:
            g = np.linalg.solve(base.T, target)
        except np.linalg.LinAlgError:
            continue
        if np.all(g >= -_EDGE_TOL):
            g = np.clip(g, 0.0, None)
            if normalization == "power":
                g = g / np.sqrt(g @ g)
            else:
                g = g / g.sum()
            return VbapGains(tri, g)
    raise RuntimeError("no admissible VBAP triangle found; layout is inconsistent")


def direct_driving_signals(
    bf_samples: np.ndarray,
    gains: VbapGains,
    direct_gains: np.ndarray,
    filterbank,
) -> np.ndarray:
    """Per-band driving signals of the three panning loudspeakers.

    Band i of loudspeaker j is ``g_j * direct_gains[i] * band_i(bf)``
    where ``band_i`` is the filterbank analysis filter.  Returns complex
    band signals of shape (3, n_bands, T); the full-band signals are their
    filterbank synthesis per loudspeaker.
    """
    direct_gains = np.asarray(direct_gains, dtype=float)
    if direct_gains.shape != (filterbank.n_bands,):
        raise ValueError(
            f"need one direct gain per band ({filterbank.n_bands}), "
            f"got {direct_gains.shape}"
        )
    bands = filterbank.analyze(np.asarray(bf_samples, dtype=float))
    return (
        gains.gains[:, None, None] * direct_gains[None, :, None] * bands[None, :, :]
    )
