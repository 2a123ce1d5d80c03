"""Real spherical harmonics, field expansions and rigid-sphere array encoding.

All spherical harmonics are real-valued and orthonormal, without the
Condon-Shortley phase, and channels are ordered by ACN (acn = n^2 + n + m).
Elevation ``theta`` is the polar angle measured from the +z axis.

Everything in this module is a pure function over immutable inputs and is
safe for concurrent read-only use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp_special

SPEED_OF_SOUND = 343.0


@dataclass(frozen=True)
class Direction:
    """Direction on the sphere.

    Parameters
    ----------
    theta : float
        Elevation (polar) angle in radians, 0 at the +z pole, within [0, pi].
    phi : float
        Azimuth angle in radians, normalized into [0, 2*pi).
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"elevation must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, "phi", float(np.mod(self.phi, 2.0 * np.pi)))

    @classmethod
    def from_unit_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("zero vector has no direction")
        v = v / norm
        theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
        phi = float(np.arctan2(v[1], v[0]))
        return cls(theta, phi)

    def to_unit_vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)]
        )


@dataclass(frozen=True)
class ShIndex:
    """Spherical-harmonic index pair (order n, degree m)."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or abs(self.m) > self.n:
            raise ValueError(f"invalid SH index (n={self.n}, m={self.m})")

    @property
    def acn(self) -> int:
        return self.n * self.n + self.n + self.m

    @classmethod
    def from_acn(cls, acn: int) -> "ShIndex":
        if acn < 0:
            raise ValueError(f"ACN must be non-negative, got {acn}")
        n = int(np.floor(np.sqrt(acn)))
        return cls(n, acn - n * n - n)


def num_channels(max_order: int) -> int:
    """Channel count (N+1)^2 for a truncation order N."""
    return (max_order + 1) ** 2


def acn_orders(max_order: int) -> np.ndarray:
    """Order n of every ACN channel up to ``max_order``."""
    return np.repeat(np.arange(max_order + 1), 2 * np.arange(max_order + 1) + 1)


def assoc_legendre(n: int, m: int, x) -> np.ndarray | float:
    """Associated Legendre function P_{n,m}(x) without Condon-Shortley phase.

    Evaluated by the stable upward recurrence over the order, starting from
    the closed-form diagonal term P_{m,m}.

    Parameters
    ----------
    n, m : int
        Order and degree with 0 <= m <= n.
    x : float or array_like
        Argument in [-1, 1].
    """
    if m < 0 or m > n:
        raise ValueError(f"degree must satisfy 0 <= m <= n, got (n={n}, m={m})")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("argument of assoc_legendre must lie in [-1, 1]")

    # P_{m,m} = (2m-1)!! (1-x^2)^{m/2}
    pmm = np.ones_like(x)
    if m > 0:
        somx2 = np.sqrt((1.0 - x) * (1.0 + x))
        fact = 1.0
        for _ in range(m):
            pmm = pmm * fact * somx2
            fact += 2.0
    if n == m:
        return pmm if pmm.ndim else float(pmm)

    pmmp1 = x * (2.0 * m + 1.0) * pmm
    if n == m + 1:
        return pmmp1 if pmmp1.ndim else float(pmmp1)

    for nn in range(m + 2, n + 1):
        pnn = (x * (2.0 * nn - 1.0) * pmmp1 - (nn + m - 1.0) * pmm) / (nn - m)
        pmm, pmmp1 = pmmp1, pnn
    return pmmp1 if pmmp1.ndim else float(pmmp1)


def sh_eval(idx: ShIndex, direction: Direction) -> float:
    """Single real orthonormal spherical harmonic Y_n^m at one direction."""
    n, m = idx.n, idx.m
    am = abs(m)
    norm = np.sqrt(
        (2.0 * n + 1.0)
        * sp_special.factorial(n - am)
        / (4.0 * np.pi * sp_special.factorial(n + am))
    )
    leg = assoc_legendre(n, am, np.cos(direction.theta))
    if m < 0:
        azi = np.sqrt(2.0) * np.sin(am * direction.phi)
    elif m > 0:
        azi = np.sqrt(2.0) * np.cos(am * direction.phi)
    else:
        azi = 1.0
    return float(norm * leg * azi)


def sh_matrix(max_order: int, theta, phi) -> np.ndarray:
    """Matrix of real SH values, shape (n_dirs, (N+1)^2), ACN column order."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    out = np.empty((theta.size, num_channels(max_order)))
    cos_t = np.cos(theta)
    for n in range(max_order + 1):
        for m in range(-n, n + 1):
            am = abs(m)
            norm = np.sqrt(
                (2.0 * n + 1.0)
                * sp_special.factorial(n - am)
                / (4.0 * np.pi * sp_special.factorial(n + am))
            )
            leg = assoc_legendre(n, am, cos_t)
            if m < 0:
                azi = np.sqrt(2.0) * np.sin(am * phi)
            elif m > 0:
                azi = np.sqrt(2.0) * np.cos(am * phi)
            else:
                azi = np.ones_like(phi)
            out[:, n * n + n + m] = norm * leg * azi
    return out


def sh_vector(max_order: int, direction: Direction) -> np.ndarray:
    """All real SH values at one direction, ACN order, shape ((N+1)^2,)."""
    return sh_matrix(max_order, direction.theta, direction.phi)[0]


def spherical_bessel_j(n: int, x) -> np.ndarray | float:
    """Spherical Bessel function of the first kind j_n(x), x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("spherical_bessel_j requires x >= 0")
    out = sp_special.spherical_jn(n, x)
    return out if out.ndim else float(out)


def spherical_hankel(kind: int, n: int, x, derivative: bool = False):
    """Spherical Hankel function h_n^(1) or h_n^(2) for x > 0."""
    if kind not in (1, 2):
        raise ValueError(f"Hankel kind must be 1 or 2, got {kind}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("spherical Hankel functions require x > 0")
    j = sp_special.spherical_jn(n, x, derivative=derivative)
    y = sp_special.spherical_yn(n, x, derivative=derivative)
    h = j + 1j * y if kind == 1 else j - 1j * y
    return h if np.ndim(h) else complex(h)


def rigid_sphere_radial(n: int, k, r: float, array_radius: float):
    """Radial term b_n(kr) of a rigid spherical array of radius ``array_radius``.

    b_n(kr) = j_n(kr) - [j_n'(k r_e) / h_n^(2)'(k r_e)] h_n^(2)(kr).
    At k = 0 the analytic limit is 1 for n = 0 and 0 otherwise.
    """
    if array_radius <= 0.0:
        raise ValueError("array radius must be positive")
    if r < array_radius:
        raise ValueError("evaluation radius must be >= array radius")
    k = np.asarray(k, dtype=float)
    if np.any(k < 0.0):
        raise ValueError("wavenumber must be non-negative")
    scalar = k.ndim == 0
    k = np.atleast_1d(k)

    out = np.zeros(k.shape, dtype=complex)
    nz = k > 0.0
    if np.any(nz):
        x_e = k[nz] * array_radius
        x_r = k[nz] * r
        jp = sp_special.spherical_jn(n, x_e, derivative=True)
        h2p = spherical_hankel(2, n, x_e, derivative=True)
        out[nz] = sp_special.spherical_jn(n, x_r) - (jp / h2p) * spherical_hankel(
            2, n, x_r
        )
    if n == 0:
        out[~nz] = 1.0
    return complex(out[0]) if scalar else out


def plane_wave_coefficients(direction: Direction, max_order: int) -> np.ndarray:
    """Ambisonics coefficients of a unit plane wave from ``direction``.

    Returns 4*pi * i^n * Y_n^m(direction) for all channels up to
    ``max_order`` (the radial factor j_n(kr) is applied at evaluation
    points, see :func:`evaluate_field`).
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    y = sh_vector(max_order, direction)
    phases = (1j ** acn_orders(max_order)).astype(complex)
    return 4.0 * np.pi * phases * y


def point_source_coefficients(
    source_radius: float, direction: Direction, k: float, max_order: int
) -> np.ndarray:
    """Ambisonics coefficients of a unit point source at (r_s, direction).

    Returns i*k*h_n^(1)(k r_s) * Y_n^m(direction); valid for evaluation
    radii r < r_s.
    """
    if source_radius <= 0.0:
        raise ValueError("source radius must be positive")
    if k <= 0.0:
        raise ValueError("point source expansion requires k > 0")
    y = sh_vector(max_order, direction)
    orders = acn_orders(max_order)
    radial = np.array(
        [spherical_hankel(1, n, k * source_radius) for n in range(max_order + 1)]
    )
    return 1j * k * radial[orders] * y


def evaluate_field(
    coefficients: np.ndarray, k: float, r: float, direction: Direction
) -> complex:
    """Evaluate a regular SH expansion sum_nm C_nm j_n(kr) Y_nm at one point."""
    coefficients = np.asarray(coefficients)
    max_order = int(np.sqrt(coefficients.size)) - 1
    y = sh_vector(max_order, direction)
    orders = acn_orders(max_order)
    radial = np.array(
        [spherical_bessel_j(n, k * r) for n in range(max_order + 1)]
    )
    return complex(np.sum(coefficients * radial[orders] * y))


@dataclass(frozen=True)
class RegularizationPolicy:
    """Soft magnitude cap for radial inversion gains.

    A raw inverse gain g is replaced by g / (1 + |g|/g_max), which preserves
    phase and limits the magnitude to g_max.  g_max is ``max_boost_db``
    above the smallest unregularized gain magnitude of the same order across
    the processed frequency axis (the mid-frequency gain of that order).
    """

    max_boost_db: float = 20.0

    def apply(self, gains: np.ndarray) -> np.ndarray:
        """Soft-cap a vector of inverse gains belonging to one order."""
        gains = np.asarray(gains, dtype=complex)
        mags = np.abs(gains)
        ref = np.min(mags[mags > 0.0]) if np.any(mags > 0.0) else 0.0
        if ref == 0.0:
            return gains
        g_max = ref * 10.0 ** (self.max_boost_db / 20.0)
        return gains / (1.0 + mags / g_max)


def rigid_sphere_pressure(
    coefficients: np.ndarray, k, geometry, max_order: int
) -> np.ndarray:
    """Forward model: capsule pressures on a rigid sphere for SH coefficients.

    Implements the recorded-pressure expansion P = sum_nm A_nm b_n(k r_e)
    Y_nm(capsule) for every capsule of ``geometry``.  ``coefficients`` may be
    a single ACN vector or an array of shape (channels, n_freq) matched to a
    vector of wavenumbers ``k``.

    Returns an array of shape (Q,) or (Q, n_freq).
    """
    coefficients = np.asarray(coefficients, dtype=complex)
    k = np.asarray(k, dtype=float)
    y = sh_matrix(max_order, geometry.theta, geometry.phi)
    orders = acn_orders(max_order)
    radial = np.stack(
        [
            np.atleast_1d(rigid_sphere_radial(n, k, geometry.radius, geometry.radius))
            for n in range(max_order + 1)
        ]
    )
    if coefficients.ndim == 1:
        coefficients = coefficients[:, None]
    weighted = coefficients * radial[orders]
    out = y @ weighted
    return out[:, 0] if k.ndim == 0 else out


def encode_capsule_spectra(
    pressures: np.ndarray,
    geometry,
    max_order: int,
    k,
    regularization: RegularizationPolicy | None = None,
) -> np.ndarray:
    """Encode capsule pressure spectra into Ambisonics coefficients.

    Implements the weighted quadrature projection over the capsules followed
    by division by the rigid-sphere radial term of each order, with the
    inverse magnitude soft-capped by ``regularization``.  A k = 0 bin is
    passed through on channel (0, 0) only.

    Parameters
    ----------
    pressures : ndarray, shape (Q,) or (Q, n_freq)
        Complex capsule pressures, one row per capsule of ``geometry``.
    geometry : ArrayGeometry
        Capsule array; must have role ``capsule-array`` and at least
        (max_order+1)^2 capsules.
    max_order : int
        Ambisonics truncation order of the output.
    k : float or ndarray
        Wavenumber per frequency bin.

    Returns
    -------
    ndarray, shape ((N+1)^2,) or ((N+1)^2, n_freq)
    """
    from .geometry import GeometryRoleError, UndersampledArrayError

    if geometry.role != "capsule-array":
        raise GeometryRoleError(
            f"encoding requires a capsule-array geometry, got {geometry.role!r}"
        )
    pressures = np.asarray(pressures, dtype=complex)
    scalar_k = np.ndim(k) == 0
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if pressures.ndim == 1:
        pressures = pressures[:, None]
    if pressures.shape[0] != geometry.count:
        raise ValueError(
            f"pressure rows ({pressures.shape[0]}) do not match capsule count "
            f"({geometry.count})"
        )
    if geometry.count < num_channels(max_order):
        raise UndersampledArrayError(
            f"{geometry.count} capsules cannot resolve order {max_order} "
            f"({num_channels(max_order)} channels)"
        )
    if regularization is None:
        regularization = RegularizationPolicy()

    y = sh_matrix(max_order, geometry.theta, geometry.phi)
    projected = (y * geometry.weights[:, None]).T @ pressures

    orders = acn_orders(max_order)
    nz = k > 0.0
    inverse = np.zeros((max_order + 1, k.size), dtype=complex)
    for n in range(max_order + 1):
        b = rigid_sphere_radial(n, k[nz], geometry.radius, geometry.radius)
        inverse[n, nz] = regularization.apply(1.0 / b)
        # DC bypass: unity on order 0, zero on higher orders.
        inverse[n, ~nz] = 1.0 if n == 0 else 0.0
    coeffs = projected * inverse[orders]
    return coeffs[:, 0] if scalar_k else coeffs
