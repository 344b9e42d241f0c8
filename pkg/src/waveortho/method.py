"""Approximate-orthogonality solver for scalar scattering problems.

The scattered field is represented as a finite superposition of radiating
basis functions D_i (plane waves, interior point sources, or outgoing
spherical modes). Imposing the boundary condition A u = 0 on the surface and
projecting onto the basis traces A D_i gives the Gram system

    G v = -b,   G_ij = <A D_i, A D_j>,   b_i = <A D_i, A u0>,

where <.,.> is the weighted surface inner product. When the traces are close
to orthogonal on the surface, G is diagonally dominant and the normalized
diagonal solve v_i = -b_i / G_ii already cancels the incident trace well.
The same diagonal serves as a preconditioner for an iterative refinement
that converges to the full Galerkin solution whenever the iteration matrix
is a contraction.

Conventions: incident plane waves have unit amplitude by default; far fields
in 3D follow u ~ f(theta) exp(ikr)/r with theta the polar angle from +z, and
in 2D follow u ~ f(theta) exp(ikr)/sqrt(r) with theta measured from the +y
axis (the screen normal) toward +x.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from . import specfun
from .errors import (
    DegenerateBasisError,
    DomainError,
    InvalidBasisError,
    SingularityError,
    SingularSystemError,
    UndefinedNormalizationError,
)
from .geometry import Surface

# Gram diagonal entries below this fraction of the largest diagonal entry
# mean a basis function has essentially no trace on the surface.
DEGENERATE_DIAG_FRACTION = 1e-300


class BoundaryCondition(enum.Enum):
    """Boundary operator A: field trace (soft) or normal-derivative trace (hard)."""

    SOFT = "soft"
    HARD = "hard"

    @classmethod
    def from_string(cls, text: str) -> "BoundaryCondition":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DomainError(f"unknown boundary condition {text!r}") from None


@dataclass(frozen=True, eq=False)
class IncidentField:
    """Unit-amplitude-by-default plane wave exp(ik d.r)."""

    direction: np.ndarray
    k: float
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        object.__setattr__(self, "direction", d)
        if d.ndim != 1 or d.shape[0] not in (2, 3):
            raise DomainError("incident direction must be a 2- or 3-vector")
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise DomainError("incident direction must be a unit vector")
        if self.k <= 0:
            raise DomainError("incident wavenumber must be positive")

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return self.amplitude * np.exp(1j * self.k * points @ self.direction)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        vals = self.values(points)
        return 1j * self.k * vals[:, None] * self.direction[None, :]


# ---------------------------------------------------------------------------
# Basis families


@dataclass(frozen=True, eq=False)
class PlaneWaveBasis:
    """Propagating plane waves exp(ik d_i.r) over a fixed direction set."""

    directions: np.ndarray
    k: float

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        object.__setattr__(self, "directions", d)
        if d.ndim != 2 or d.shape[1] not in (2, 3) or d.shape[0] < 1:
            raise InvalidBasisError("directions must be a (M, 2) or (M, 3) array")
        if self.k <= 0:
            raise InvalidBasisError("basis wavenumber must be positive")
        norms = np.linalg.norm(d, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise InvalidBasisError("plane-wave directions must be unit vectors")

    @property
    def size(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.exp(1j * self.k * points @ self.directions.T)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        vals = self.values(points)
        return 1j * self.k * vals[:, :, None] * self.directions[None, :, :]


@dataclass(frozen=True, eq=False)
class PointSourceBasis:
    """Free-space Green's functions centered at points inside the body."""

    locations: np.ndarray
    k: float

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        object.__setattr__(self, "locations", loc)
        if loc.ndim != 2 or loc.shape[1] not in (2, 3) or loc.shape[0] < 1:
            raise InvalidBasisError("locations must be a (M, 2) or (M, 3) array")
        if self.k <= 0:
            raise InvalidBasisError("basis wavenumber must be positive")

    @property
    def size(self) -> int:
        return self.locations.shape[0]

    @property
    def dim(self) -> int:
        return self.locations.shape[1]

    def _displacements(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        d = points[:, None, :] - self.locations[None, :, :]
        r = np.linalg.norm(d, axis=2)
        if np.any(r < 1e-12):
            raise SingularityError("evaluation point coincides with a source location")
        return d, r

    def values(self, points: np.ndarray) -> np.ndarray:
        d, r = self._displacements(points)
        if self.dim == 3:
            return np.exp(1j * self.k * r) / (4.0 * np.pi * r)
        h0, _ = specfun.cyl_hankel1_0(self.k * r)
        return 0.25j * h0

    def gradients(self, points: np.ndarray) -> np.ndarray:
        d, r = self._displacements(points)
        rhat = d / r[:, :, None]
        if self.dim == 3:
            vals = np.exp(1j * self.k * r) / (4.0 * np.pi * r)
            radial = (1j * self.k - 1.0 / r) * vals
        else:
            _, dh0 = specfun.cyl_hankel1_0(self.k * r)
            radial = 0.25j * self.k * dh0
        return radial[:, :, None] * rhat


@dataclass(frozen=True)
class SphericalModeBasis:
    """Outgoing axisymmetric modes h_n^(1)(kr) P_n(cos theta), n = 0..max_order."""

    max_order: int
    k: float

    def __post_init__(self):
        if self.max_order < 0:
            raise InvalidBasisError("max_order must be non-negative")
        if self.max_order > specfun.MAX_ORDER:
            raise InvalidBasisError(
                f"max_order {self.max_order} exceeds the supported cap "
                f"{specfun.MAX_ORDER}"
            )
        if self.k <= 0:
            raise InvalidBasisError("basis wavenumber must be positive")

    @property
    def size(self) -> int:
        return self.max_order + 1

    @property
    def dim(self) -> int:
        return 3

    def _polar(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        r = np.linalg.norm(points, axis=1)
        if np.any(r < 1e-12):
            raise SingularityError("spherical modes are singular at the origin")
        mu = np.clip(points[:, 2] / r, -1.0, 1.0)
        return points, r, mu

    def values(self, points: np.ndarray) -> np.ndarray:
        points, r, mu = self._polar(points)
        out = np.empty((points.shape[0], self.size), dtype=complex)
        for n in range(self.size):
            h, _ = specfun.sph_hankel1(n, self.k * r)
            out[:, n] = h * specfun.legendre_p(n, mu)
        return out

    def gradients(self, points: np.ndarray) -> np.ndarray:
        points, r, mu = self._polar(points)
        rhat = points / r[:, None]
        zhat = np.zeros_like(points)
        zhat[:, 2] = 1.0
        # grad D = k h' P rhat + h P'(mu) (zhat - mu rhat) / r
        tangent = (zhat - mu[:, None] * rhat) / r[:, None]
        out = np.empty((points.shape[0], self.size, points.shape[1]), dtype=complex)
        for n in range(self.size):
            h, hp = specfun.sph_hankel1(n, self.k * r)
            p = specfun.legendre_p(n, mu)
            pp = specfun.legendre_p_deriv(n, mu)
            out[:, n, :] = (
                (self.k * hp * p)[:, None] * rhat + (h * pp)[:, None] * tangent
            )
        return out


BasisFamily = Union[PlaneWaveBasis, PointSourceBasis, SphericalModeBasis]


# ---------------------------------------------------------------------------
# Traces and the Gram system


@dataclass(frozen=True, eq=False)
class BasisTraces:
    """Boundary traces A D_i and plain values D_i sampled at surface nodes."""

    boundary: np.ndarray  # (n_nodes, n_basis) complex, A applied
    values: np.ndarray  # (n_nodes, n_basis) complex
    bc: BoundaryCondition

    @property
    def size(self) -> int:
        return self.boundary.shape[1]


def _check_point_sources_inside(basis: PointSourceBasis, s: Surface) -> None:
    if not s.closed:
        raise InvalidBasisError(
            "point-source bases require a closed surface with an interior"
        )
    for m in range(basis.size):
        loc = basis.locations[m]
        d = s.positions - loc[None, :]
        dist = np.linalg.norm(d, axis=1)
        j = int(np.argmin(dist))
        if dist[j] < 1e-9 * s.char_size:
            raise InvalidBasisError(f"source {m} lies on the surface")
        # For the convex bodies supported here, the nearest node's outward
        # normal separates inside from outside.
        if float(np.dot(loc - s.positions[j], s.normals[j])) >= 0.0:
            raise InvalidBasisError(f"source {m} lies outside the surface")


def eval_basis_trace(basis: BasisFamily, bc: BoundaryCondition, s: Surface) -> BasisTraces:
    """Sample A D_i and D_i at the surface quadrature nodes."""
    if basis.dim != s.dim:
        raise InvalidBasisError(
            f"basis dimension {basis.dim} does not match surface dimension {s.dim}"
        )
    if isinstance(basis, PointSourceBasis):
        _check_point_sources_inside(basis, s)
    values = basis.values(s.positions)
    if bc is BoundaryCondition.SOFT:
        boundary = values.copy()
    else:
        grads = basis.gradients(s.positions)
        boundary = np.einsum("pmd,pd->pm", grads, s.normals)
    return BasisTraces(boundary=boundary, values=values, bc=bc)


def incident_trace(u0: IncidentField, bc: BoundaryCondition, s: Surface) -> np.ndarray:
    """A u0 sampled at the surface nodes."""
    if u0.dim != s.dim:
        raise DomainError("incident field dimension does not match surface")
    if bc is BoundaryCondition.SOFT:
        return u0.values(s.positions)
    return np.einsum("pd,pd->p", u0.gradients(s.positions), s.normals)


@dataclass(frozen=True, eq=False)
class GramSystem:
    """Hermitian Gram matrix, its inverse diagonal, and the projected incident data."""

    g: np.ndarray  # (M, M) complex Hermitian
    beta: np.ndarray  # (M,) real, 1 / G_ii
    b: Optional[np.ndarray] = None  # (M,) complex, <A D_i, A u0>

    @property
    def size(self) -> int:
        return self.g.shape[0]

    def with_incident(self, b: np.ndarray) -> "GramSystem":
        b = np.asarray(b, dtype=complex)
        if b.shape != (self.size,):
            raise ValueError("projected incident vector has the wrong length")
        return replace(self, b=b)

    def require_incident(self) -> np.ndarray:
        if self.b is None:
            raise ValueError("GramSystem has no incident projection; call with_incident")
        return self.b


def assemble_gram(traces: BasisTraces, s: Surface) -> GramSystem:
    """Gram matrix G_ij = <A D_i, A D_j> over the surface quadrature.

    The result is symmetrized to be exactly Hermitian; diagonal entries are
    real and strictly positive unless the basis is degenerate on this surface.
    """
    t = traces.boundary
    if t.shape[0] != s.n_nodes:
        raise ValueError("trace matrix does not match surface node count")
    weighted = s.weights[:, None] * t
    g = t.conj().T @ weighted
    g = 0.5 * (g + g.conj().T)
    diag = np.real(np.diag(g)).copy()
    max_diag = float(np.max(diag)) if diag.size else 0.0
    if max_diag <= 0.0 or np.any(diag <= DEGENERATE_DIAG_FRACTION * max_diag):
        raise DegenerateBasisError(
            "a basis function has (numerically) zero trace norm on this surface"
        )
    return GramSystem(g=g, beta=1.0 / diag)


def project_incident(
    traces: BasisTraces, s: Surface, u0: IncidentField, bc: BoundaryCondition
) -> np.ndarray:
    """Projection b_i = <A D_i, A u0> of the incident trace onto the basis traces."""
    if bc is not traces.bc:
        raise DomainError("boundary condition does not match the assembled traces")
    au0 = incident_trace(u0, bc, s)
    return traces.boundary.conj().T @ (s.weights * au0)


# ---------------------------------------------------------------------------
# Solvers


@dataclass(frozen=True, eq=False)
class DensitySpectrum:
    """Basis coefficients v with a tag recording which solver produced them."""

    v: np.ndarray
    solver: str

    @property
    def size(self) -> int:
        return self.v.shape[0]


def solve_diagonal(sys: GramSystem) -> DensitySpectrum:
    """Normalized-diagonal solve v_i = -beta_i b_i (the approximate-orthogonality step)."""
    b = sys.require_incident()
    return DensitySpectrum(v=sys.beta * (-b), solver="diagonal")


def solve_galerkin(sys: GramSystem, lam: float = 0.0) -> DensitySpectrum:
    """Full Galerkin solve (G + lam I) v = -b.

    lam = 0 requires a well-conditioned G; a tiny positive lam regularizes
    oversampled (frame-like) bases. A solve whose algebraic residual exceeds
    1e-8 relative is reported as singular with a hint to raise lam.
    """
    if lam < 0:
        raise DomainError("regularization parameter lam must be >= 0")
    b = sys.require_incident()
    a = sys.g + lam * np.eye(sys.size)
    try:
        v = np.linalg.solve(a, -b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            f"Gram system is singular ({exc}); retry with lam > 0"
        ) from None
    scale = float(np.linalg.norm(b))
    if scale > 0.0:
        resid = float(np.linalg.norm(a @ v + b)) / scale
        if resid > 1e-8:
            raise SingularSystemError(
                f"Gram solve is unreliable (relative residual {resid:.3e}); "
                "retry with lam > 0"
            )
    return DensitySpectrum(v=v, solver=f"galerkin(lam={lam:.3g})")


def refine_iterate(sys: GramSystem, n_steps: int) -> Tuple[DensitySpectrum, List[float]]:
    """Diagonal-preconditioned Richardson refinement of the Gram system.

    Starts from v = 0 and applies v <- v + beta * (-b - G v) for n_steps
    steps, so a single step reproduces solve_diagonal exactly. Returns the
    final coefficients and the algebraic residual ||G v + b|| after each
    step, including the starting residual ||b|| at step 0.
    """
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    b = sys.require_incident()
    v = np.zeros(sys.size, dtype=complex)
    history = [float(np.linalg.norm(sys.g @ v + b))]
    for _ in range(n_steps):
        v = v + sys.beta * (-b - sys.g @ v)
        history.append(float(np.linalg.norm(sys.g @ v + b)))
    return DensitySpectrum(v=v, solver=f"iterated(n={n_steps})"), history


def iteration_spectral_radius(sys: GramSystem) -> float:
    """Spectral radius of the refinement iteration matrix I - diag(beta) G."""
    m = np.eye(sys.size) - sys.beta[:, None] * sys.g
    return float(np.max(np.abs(np.linalg.eigvals(m))))


# ---------------------------------------------------------------------------
# Field reconstruction and diagnostics


def eval_scattered(
    basis: BasisFamily,
    v: DensitySpectrum,
    u0: Optional[IncidentField],
    points: np.ndarray,
) -> np.ndarray:
    """Total field u0 + sum_i v_i D_i at the given points (scattered only if u0 is None)."""
    if v.size != basis.size:
        raise ValueError("coefficient length does not match basis size")
    points = np.asarray(points, dtype=float)
    field = basis.values(points) @ v.v
    if u0 is not None:
        if u0.dim != basis.dim:
            raise DomainError("incident field dimension does not match basis")
        field = u0.values(points) + field
    return field


@dataclass(frozen=True, eq=False)
class FarFieldPattern:
    """Complex far-field amplitude sampled on a strictly increasing angle grid."""

    angles: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        amp = np.asarray(self.amplitude, dtype=complex)
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "amplitude", amp)
        if a.ndim != 1 or amp.shape != a.shape:
            raise ValueError("angles and amplitude must be matching 1-D arrays")
        if a.size and (np.any(np.diff(a) <= 0)):
            raise ValueError("angles must be strictly increasing")
        if a.size and (a[0] < -np.pi - 1e-12 or a[-1] > np.pi + 1e-12):
            raise ValueError("angles must lie within [-pi, pi]")


def far_field(basis: BasisFamily, v: DensitySpectrum, angles: np.ndarray) -> FarFieldPattern:
    """Radiated far-field pattern of sum_i v_i D_i.

    3D sources and spherical modes use u ~ f(theta) exp(ikr)/r; 2D point
    sources use u ~ f(theta) exp(ikr)/sqrt(r). Plane-wave bases do not
    radiate from a bounded region; use angular_spectrum for them.
    """
    if isinstance(basis, PlaneWaveBasis):
        raise InvalidBasisError(
            "plane-wave bases report their coefficient spectrum; use angular_spectrum"
        )
    if v.size != basis.size:
        raise ValueError("coefficient length does not match basis size")
    angles = np.asarray(angles, dtype=float)
    if isinstance(basis, SphericalModeBasis):
        mu = np.cos(angles)
        amp = np.zeros_like(angles, dtype=complex)
        for n in range(basis.size):
            amp += v.v[n] * (-1j) ** (n + 1) * specfun.legendre_p(n, mu)
        amp /= basis.k
        return FarFieldPattern(angles=angles, amplitude=amp)
    # Point sources: f from the large-distance phase of each source.
    if basis.dim == 3:
        rhat = np.column_stack(
            (np.sin(angles), np.zeros_like(angles), np.cos(angles))
        )
        phases = np.exp(-1j * basis.k * rhat @ basis.locations.T)
        amp = phases @ v.v / (4.0 * np.pi)
    else:
        rhat = np.column_stack((np.sin(angles), np.cos(angles)))
        phases = np.exp(-1j * basis.k * rhat @ basis.locations.T)
        amp = 0.25j * np.sqrt(2.0 / (np.pi * basis.k)) * np.exp(-0.25j * np.pi) * (
            phases @ v.v
        )
    return FarFieldPattern(angles=angles, amplitude=amp)


def angular_spectrum(basis: PlaneWaveBasis, v: DensitySpectrum) -> FarFieldPattern:
    """Reflection-coefficient spectrum of a 2D plane-wave solution.

    The coefficients themselves are the angular response; no radiating
    transform is applied. Angles are the direction angles measured from the
    +y axis, which must be strictly increasing over the basis.
    """
    if not isinstance(basis, PlaneWaveBasis) or basis.dim != 2:
        raise InvalidBasisError("angular_spectrum requires a 2-D plane-wave basis")
    if v.size != basis.size:
        raise ValueError("coefficient length does not match basis size")
    angles = np.arctan2(basis.directions[:, 0], basis.directions[:, 1])
    return FarFieldPattern(angles=angles, amplitude=v.v.copy())


def boundary_residual(
    s: Surface, traces: BasisTraces, u0: IncidentField, v: DensitySpectrum
) -> float:
    """Normalized boundary defect ||A u0 + sum_i v_i A D_i|| / ||A u0||."""
    if v.size != traces.size:
        raise ValueError("coefficient length does not match trace matrix")
    au0 = incident_trace(u0, traces.bc, s)
    denom = np.sum(s.weights * np.abs(au0) ** 2)
    if denom <= 0.0:
        raise UndefinedNormalizationError(
            "incident trace vanishes on the surface; residual is undefined"
        )
    r = au0 + traces.boundary @ v.v
    num = np.sum(s.weights * np.abs(r) ** 2)
    return float(np.sqrt(num / denom))


def kernel_values(traces: BasisTraces, beta: np.ndarray, anchor: int) -> np.ndarray:
    """Kernel column Phi(r_j, r_anchor) = sum_i beta_i conj(A D_i(anchor)) A D_i(r_j)."""
    t = traces.boundary
    if not 0 <= anchor < t.shape[0]:
        raise ValueError(f"anchor index {anchor} out of range")
    return t @ (beta * np.conj(t[anchor, :]))


def kernel_profile(
    s: Surface, traces: BasisTraces, beta: np.ndarray, anchor: int
) -> Tuple[np.ndarray, np.ndarray]:
    """|Phi(r_j, r_anchor)| against chord distance |r_j - r_anchor|, sorted.

    Ties in distance keep node order (stable sort) so output is deterministic.
    """
    phi = kernel_values(traces, beta, anchor)
    d = np.linalg.norm(s.positions - s.positions[anchor][None, :], axis=1)
    order = np.argsort(d, kind="stable")
    return d[order], np.abs(phi)[order]


def epsilon_diagnostic(sys: GramSystem, v: DensitySpectrum) -> float:
    """Off-diagonal coupling measure.

    max over pairs chi != xi of (|G_chi,xi| / G_xi,xi) * |v_chi - v_xi|,
    normalized by max_i |v_i|. Zero for a single-entry basis, an exactly
    diagonal Gram matrix, or a constant coefficient vector.
    """
    m = sys.size
    if v.size != m:
        raise ValueError("coefficient length does not match Gram size")
    if m < 2:
        return 0.0
    vmax = float(np.max(np.abs(v.v)))
    if vmax == 0.0:
        return 0.0
    diag = np.real(np.diag(sys.g))
    ratio = np.abs(sys.g) / diag[None, :]  # |G_chi,xi| / G_xi,xi
    dv = np.abs(v.v[:, None] - v.v[None, :]) / vmax
    prod = ratio * dv
    np.fill_diagonal(prod, 0.0)
    return float(np.max(prod))
