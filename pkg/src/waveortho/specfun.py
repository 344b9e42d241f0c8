"""Special functions shared by every solver module.

Spherical Bessel/Hankel functions with derivatives, Legendre polynomials,
and order-zero cylindrical Bessel functions. These are thin wrappers around
scipy.special that add the domain checks and analytic origin limits the rest
of the package relies on, behind a stable local interface.

Orders are capped at MAX_ORDER; accuracy is validated by the test suite up to
arguments of about 1e3, which covers every scenario shipped with the package.
"""

from __future__ import annotations

from typing import Tuple, Union

import numpy as np
from scipy import special as _sp

from .errors import DomainError, UnsupportedOrderError

MAX_ORDER = 200

ArrayLike = Union[float, np.ndarray]


def _check_order(n: int) -> int:
    if not isinstance(n, (int, np.integer)):
        raise DomainError(f"order must be an integer, got {n!r}")
    if n < 0:
        raise DomainError(f"order must be non-negative, got {n}")
    if n > MAX_ORDER:
        raise UnsupportedOrderError(
            f"order {n} exceeds the supported cap {MAX_ORDER}"
        )
    return int(n)


def sph_bessel_j(n: int, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Spherical Bessel function j_n(x) and its derivative j_n'(x).

    Defined for x >= 0; the origin uses the analytic limits j_0(0) = 1,
    j_n(0) = 0 for n >= 1, and correspondingly j_1'(0) = 1/3.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("sph_bessel_j requires finite x >= 0")
    return _sp.spherical_jn(n, x), _sp.spherical_jn(n, x, derivative=True)


def sph_bessel_y(n: int, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Spherical Neumann function y_n(x) and derivative, for x > 0."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise DomainError("sph_bessel_y requires finite x > 0")
    return _sp.spherical_yn(n, x), _sp.spherical_yn(n, x, derivative=True)


def sph_hankel1(n: int, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Outgoing spherical Hankel function h_n^(1)(x) = j_n + i y_n, with derivative.

    Requires x > 0 (the Neumann part diverges at the origin).
    """
    j, jp = sph_bessel_j(n, x)
    y, yp = sph_bessel_y(n, x)
    return j + 1j * y, jp + 1j * yp


def legendre_p(n: int, x: ArrayLike) -> np.ndarray:
    """Legendre polynomial P_n(x) for |x| <= 1."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise DomainError("legendre_p requires |x| <= 1")
    return _sp.eval_legendre(n, np.clip(x, -1.0, 1.0))


def legendre_p_deriv(n: int, x: ArrayLike) -> np.ndarray:
    """Derivative P_n'(x) on [-1, 1], finite at the endpoints.

    Away from the poles this uses the standard recurrence
    P_n'(x) = n (P_{n-1}(x) - x P_n(x)) / (1 - x^2); at x = +-1 the limit
    (+-1)^(n+1) n(n+1)/2 applies.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise DomainError("legendre_p_deriv requires |x| <= 1")
    x = np.clip(x, -1.0, 1.0)
    if n == 0:
        return np.zeros_like(x)
    near_pole = np.abs(np.abs(x) - 1.0) < 1e-12
    safe = np.where(near_pole, 0.0, x)
    pn = _sp.eval_legendre(n, safe)
    pnm1 = _sp.eval_legendre(n - 1, safe)
    with np.errstate(divide="ignore", invalid="ignore"):
        body = n * (pnm1 - safe * pn) / (1.0 - safe * safe)
    pole_val = np.sign(x) ** (n + 1) * n * (n + 1) / 2.0
    return np.where(near_pole, pole_val, body)


def cyl_bessel_j0(x: ArrayLike) -> np.ndarray:
    """Cylindrical Bessel function J_0(x) for x >= 0 (J_0(0) = 1)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("cyl_bessel_j0 requires finite x >= 0")
    return _sp.j0(x)


def cyl_bessel_j0y0(x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Order-zero cylindrical Bessel pair (J_0(x), Y_0(x)).

    Y_0 has a logarithmic singularity at the origin, so x must be strictly
    positive here; use cyl_bessel_j0 when only J_0 at x = 0 is needed.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise DomainError("cyl_bessel_j0y0 requires finite x > 0 (Y_0 diverges at 0)")
    return _sp.j0(x), _sp.y0(x)


def cyl_hankel1_0(x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """H_0^(1)(x) and its derivative -H_1^(1)(x), for x > 0.

    This is the radial kernel of the two-dimensional free-space Green's
    function, so the derivative is provided for gradient evaluations.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise DomainError("cyl_hankel1_0 requires finite x > 0")
    h0 = _sp.j0(x) + 1j * _sp.y0(x)
    h1 = _sp.j1(x) + 1j * _sp.y1(x)
    return h0, -h1
