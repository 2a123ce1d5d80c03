"""Regenerate the .geom fixtures shipped in src/ambicomp/data.

Run from the repository root:  python tools/make_geometry_fixtures.py
"""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ambicomp.geometry import ArrayGeometry, fit_quadrature_weights, write_geometry
from ambicomp.spherical import Direction, sh_matrix

OUT = Path(__file__).resolve().parents[1] / "src" / "ambicomp" / "data"

# mh-acoustics EM32 capsule angles (colatitude, azimuth) in degrees.
EM32_DEG = [
    (69, 0), (90, 32), (111, 0), (90, 328), (32, 0), (55, 45), (90, 69),
    (125, 45), (148, 0), (125, 315), (90, 291), (55, 315), (21, 91),
    (58, 90), (121, 90), (159, 89), (69, 180), (90, 212), (111, 180),
    (90, 148), (32, 180), (55, 225), (90, 249), (125, 225), (148, 180),
    (125, 135), (90, 111), (55, 135), (21, 269), (58, 270), (121, 270),
    (159, 271),
]
EM32_RADIUS = 0.042


def make_em32() -> ArrayGeometry:
    theta = np.deg2rad([t for t, _ in EM32_DEG])
    phi = np.deg2rad([p for _, p in EM32_DEG])
    weights = fit_quadrature_weights(theta, phi, max_order=4)
    return ArrayGeometry("capsule-array", EM32_RADIUS, theta, phi, weights)


def make_lebedev50() -> ArrayGeometry:
    """Lebedev 50-node rule (octahedral symmetry, exact to degree 11)."""
    pts = []
    wts = []

    def add(points, weight):
        for p in points:
            pts.append(np.asarray(p, dtype=float))
            wts.append(weight)

    w1 = float(Fraction(4, 315))
    w2 = float(Fraction(64, 2835))
    w3 = float(Fraction(27, 1280))
    w4 = float(Fraction(14641, 725760))

    add([(s, 0, 0) for s in (1, -1)], w1)
    add([(0, s, 0) for s in (1, -1)], w1)
    add([(0, 0, s) for s in (1, -1)], w1)

    a = 1.0 / np.sqrt(2.0)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for si in (1, -1):
            for sj in (1, -1):
                p = [0.0, 0.0, 0.0]
                p[i], p[j] = si * a, sj * a
                add([p], w2)

    b = 1.0 / np.sqrt(3.0)
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                add([(sx * b, sy * b, sz * b)], w3)

    l = 1.0 / np.sqrt(11.0)
    m = 3.0 / np.sqrt(11.0)
    for slot in range(3):
        for sl1 in (1, -1):
            for sl2 in (1, -1):
                for sm in (1, -1):
                    p = [0.0, 0.0, 0.0]
                    rest = [i for i in range(3) if i != slot]
                    p[slot] = sm * m
                    p[rest[0]], p[rest[1]] = sl1 * l, sl2 * l
                    add([p], w4)

    pts = np.array(pts)
    wts = np.array(wts) * 4.0 * np.pi
    theta = np.arccos(np.clip(pts[:, 2], -1, 1))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    return ArrayGeometry("loudspeaker-array", 1.5, theta, phi, wts)


def make_tdesign(strength: int = 6, n_points: int = 24, seed0: int = 0):
    """Equal-weight design: sum_q Y_nm(q) = 0 for 1 <= n <= strength."""
    n_coeffs = (strength + 1) ** 2 - 1

    def residuals(params):
        theta = params[:n_points]
        phi = params[n_points:]
        y = sh_matrix(strength, theta, phi)
        return y.sum(axis=0)[1:]

    for seed in range(seed0, seed0 + 50):
        rng = np.random.default_rng(seed)
        theta0 = np.arccos(rng.uniform(-1, 1, n_points))
        phi0 = rng.uniform(0, 2 * np.pi, n_points)
        sol = least_squares(
            residuals,
            np.concatenate([theta0, phi0]),
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=20000,
        )
        theta = np.mod(sol.x[:n_points], 2 * np.pi)
        flip = theta > np.pi
        theta[flip] = 2 * np.pi - theta[flip]
        phi = sol.x[n_points:] + np.where(flip, np.pi, 0.0)
        y_err = np.max(np.abs(sh_matrix(strength, theta, phi).sum(axis=0)[1:]))
        print(f"  t-design seed {seed}: residual {y_err:.3e}")
        if y_err < 1e-12:
            weights = np.full(n_points, 4.0 * np.pi / n_points)
            return ArrayGeometry("capsule-array", 0.042, theta, phi, weights)
    raise RuntimeError(f"no {strength}-design with {n_points} points found")


def verify(geom: ArrayGeometry, pair_order: int, tol: float) -> float:
    y = sh_matrix(pair_order, geom.theta, geom.phi)
    gram = (y * geom.weights[:, None]).T @ y
    err = np.max(np.abs(gram - np.eye(gram.shape[0])))
    print(f"  orthonormality up to order {pair_order}: max |err| = {err:.3e}")
    assert err < tol, err
    return err


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    print("lebedev50:")
    leb = make_lebedev50()
    verify(leb, 5, 1e-12)
    write_geometry(leb, OUT / "lebedev50.geom")

    print("tdesign_order6:")
    tdes = make_tdesign()
    verify(tdes, 3, 1e-12)
    write_geometry(tdes, OUT / "tdesign_order6.geom")

    print("em32:")
    em32 = make_em32()
    verify(em32, 4, 0.05)
    write_geometry(em32, OUT / "em32.geom")
    print("wrote fixtures to", OUT)


if __name__ == "__main__":
    main()
