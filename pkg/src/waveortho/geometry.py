"""Quadrature surfaces, free-space Green's functions, and surface inner products.

A Surface is a plain container of quadrature nodes: positions, unit outward
normals, and positive weights that sum to the surface measure. Axisymmetric
3D bodies (sphere, prolate spheroid) use a tensor grid of Gauss-Legendre
nodes in cos(theta) times a uniform azimuth grid, which integrates smooth
integrands spectrally and keeps Legendre products exactly orthogonal up to
the quadrature degree. The 2D strip uses endpoint-clustered nodes from the
cosine map, matching how field gradients concentrate near screen edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import (
    DomainError,
    NotProlateError,
    SingularityError,
    TooCoarseError,
)

MIN_RESOLUTION = 4

# Relative node separation below which two points are treated as coincident
# when evaluating Green's functions.
COINCIDENCE_TOL = 1e-12


@dataclass(frozen=True)
class Sphere:
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("sphere radius must be positive")


@dataclass(frozen=True)
class Strip:
    """Zero-thickness planar screen of the given width, lying on the x axis."""

    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError("strip width must be positive")


@dataclass(frozen=True)
class Spheroid:
    """Prolate spheroid with equatorial radius a and polar radius c > a."""

    equatorial_radius: float
    polar_radius: float

    def __post_init__(self):
        if self.equatorial_radius <= 0:
            raise DomainError("spheroid radii must be positive")
        if self.polar_radius <= self.equatorial_radius:
            raise NotProlateError(
                "spheroid must be prolate: polar radius c must exceed "
                f"equatorial radius a (got a={self.equatorial_radius}, "
                f"c={self.polar_radius})"
            )


Shape = Union[Sphere, Strip, Spheroid]


@dataclass(frozen=True, eq=False)
class Surface:
    """Quadrature representation of a scattering surface.

    Attributes
    ----------
    positions : (N, dim) float array of node coordinates.
    normals : (N, dim) float array of unit outward normals per node.
    weights : (N,) positive quadrature weights summing to the surface measure.
    closed : whether the surface encloses a volume.
    dim : ambient dimension (2 or 3).
    char_size : characteristic size (largest chord) used for scale checks.
    """

    positions: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    closed: bool
    dim: int
    char_size: float

    def __post_init__(self):
        p, n, w = self.positions, self.normals, self.weights
        if p.ndim != 2 or n.shape != p.shape or w.shape != (p.shape[0],):
            raise ValueError("surface arrays have inconsistent shapes")
        if self.dim not in (2, 3) or p.shape[1] != self.dim:
            raise ValueError("surface dim must be 2 or 3 and match positions")
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be strictly positive")
        norms = np.linalg.norm(n, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("normals must be unit vectors")
        if self.char_size <= 0:
            raise ValueError("char_size must be positive")

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    def area(self) -> float:
        return float(np.sum(self.weights))


def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(n)


def _axisymmetric_grid(resolution: int):
    """Gauss nodes in u = cos(theta) crossed with a uniform azimuth grid."""
    u, wu = gauss_legendre(resolution)
    n_phi = 2 * resolution
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    w_phi = 2.0 * np.pi / n_phi
    uu = np.repeat(u, n_phi)
    ww = np.repeat(wu, n_phi) * w_phi
    pp = np.tile(phi, resolution)
    return uu, pp, ww


def make_surface(shape: Shape, resolution: int) -> Surface:
    """Build the quadrature surface for a supported shape.

    resolution controls the polar node count for 3D bodies (azimuth gets
    twice that) and the node count for the 2D strip. Must be at least 4.
    """
    if resolution < MIN_RESOLUTION:
        raise TooCoarseError(
            f"resolution {resolution} is below the minimum {MIN_RESOLUTION}"
        )
    if isinstance(shape, Sphere):
        return _sphere_surface(shape.radius, resolution)
    if isinstance(shape, Spheroid):
        return _spheroid_surface(shape.equatorial_radius, shape.polar_radius, resolution)
    if isinstance(shape, Strip):
        return _strip_surface(shape.width, resolution)
    raise ValueError(f"unsupported shape {shape!r}")


def _sphere_surface(radius: float, resolution: int) -> Surface:
    u, phi, w = _axisymmetric_grid(resolution)
    s = np.sqrt(1.0 - u * u)
    normals = np.column_stack((s * np.cos(phi), s * np.sin(phi), u))
    positions = radius * normals
    weights = radius * radius * w
    return Surface(
        positions=positions,
        normals=normals,
        weights=weights,
        closed=True,
        dim=3,
        char_size=2.0 * radius,
    )


def _spheroid_surface(a: float, c: float, resolution: int) -> Surface:
    u, phi, w = _axisymmetric_grid(resolution)
    s = np.sqrt(1.0 - u * u)
    x = a * s * np.cos(phi)
    y = a * s * np.sin(phi)
    z = c * u
    positions = np.column_stack((x, y, z))
    # Outward normal direction is the gradient of (x^2+y^2)/a^2 + z^2/c^2.
    raw = np.column_stack((x / a**2, y / a**2, z / c**2))
    normals = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    # dS = a * sqrt(c^2 (1-u^2) + a^2 u^2) du dphi
    weights = a * np.sqrt(c * c * (1.0 - u * u) + a * a * u * u) * w
    return Surface(
        positions=positions,
        normals=normals,
        weights=weights,
        closed=True,
        dim=3,
        char_size=2.0 * c,
    )


def _strip_surface(width: float, resolution: int) -> Surface:
    # Cosine-map cells: edges at -w/2 cos(pi j / N) cluster nodes toward the
    # strip ends; node j sits at the cell's angular midpoint.
    j = np.arange(resolution)
    edges = -0.5 * width * np.cos(np.pi * np.arange(resolution + 1) / resolution)
    nodes_x = -0.5 * width * np.cos(np.pi * (j + 0.5) / resolution)
    weights = np.diff(edges)
    positions = np.column_stack((nodes_x, np.zeros(resolution)))
    normals = np.column_stack((np.zeros(resolution), np.ones(resolution)))
    return Surface(
        positions=positions,
        normals=normals,
        weights=weights,
        closed=False,
        dim=2,
        char_size=width,
    )


def prolate_spheroid_area(a: float, c: float) -> float:
    """Closed-form surface area of a prolate spheroid (c > a)."""
    if c <= a:
        raise NotProlateError("prolate area formula requires c > a")
    e = math.sqrt(1.0 - (a / c) ** 2)
    return 2.0 * math.pi * a * a * (1.0 + (c / (a * e)) * math.asin(e))


@dataclass(frozen=True)
class GreensEval:
    """Value and target-gradient of a free-space Green's function."""

    value: complex
    gradient: np.ndarray


def greens_function(dim: int, k: float, source: np.ndarray, target: np.ndarray) -> GreensEval:
    """Outgoing free-space Helmholtz Green's function.

    3D: exp(ikR) / (4 pi R); 2D: (i/4) H_0^(1)(kR). The gradient is taken
    with respect to the target point. Coincident source and target raise
    SingularityError.
    """
    if k <= 0:
        raise DomainError("wavenumber k must be positive")
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    if source.shape != (dim,) or target.shape != (dim,):
        raise ValueError(f"source and target must be {dim}-vectors")
    d = target - source
    r = float(np.linalg.norm(d))
    scale = max(np.linalg.norm(source), np.linalg.norm(target), 1.0)
    if r <= COINCIDENCE_TOL * scale:
        raise SingularityError("greens_function evaluated at coincident points")
    rhat = d / r
    if dim == 3:
        val = np.exp(1j * k * r) / (4.0 * np.pi * r)
        grad = (1j * k - 1.0 / r) * val * rhat
    elif dim == 2:
        from .specfun import cyl_hankel1_0

        h0, dh0 = cyl_hankel1_0(k * r)
        val = 0.25j * complex(h0)
        grad = 0.25j * k * complex(dh0) * rhat
    else:
        raise ValueError("dim must be 2 or 3")
    return GreensEval(value=complex(val), gradient=grad)


def surface_inner_product(s: Surface, f: np.ndarray, g: np.ndarray) -> complex:
    """Weighted L2 inner product <f, g> = sum_j w_j conj(f_j) g_j.

    Summation runs in ascending node order so repeated runs are bit-identical.
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != (s.n_nodes,) or g.shape != (s.n_nodes,):
        raise ValueError(
            f"inner product operands must have shape ({s.n_nodes},); "
            f"got {f.shape} and {g.shape}"
        )
    return complex(np.sum(s.weights * np.conj(f) * g))
