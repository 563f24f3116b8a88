"""Argument-principle utilities: winding numbers, zero counting and location."""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from .domain import PathPolyline
from .errors import NonIntegerResult, ZeroOnContour
from .expr import HolomorphicFn
from .quadrature import contour_integrate

TWO_PI_I = 2j * np.pi


def _log_derivative(f):
    """Return z -> f'(z)/f(z), preferring the closed-form derivative."""
    if isinstance(f, HolomorphicFn) and f.has_derivative:
        df = f.derivative()
        return lambda z: df(z) / f(z)
    step = 1e-6

    def approx(z):
        z = np.asarray(z, dtype=np.complex128)
        return (f(z + step) - f(z - step)) / (2.0 * step) / f(z)

    return approx


def _loop_samples(loop: PathPolyline):
    a, b = loop.segments()
    return np.concatenate([loop.vertices, 0.5 * (a + b)])


def winding_number(
    f,
    loop: PathPolyline,
    tol: float = 1e-8,
    min_modulus: float = 1e-10,
    integer_slack: float = 1e-3,
) -> int:
    """Zeros minus poles enclosed by the loop, via (1/2πi) ∮ f'/f dz."""
    samples = _loop_samples(loop)
    mods = np.abs(f(samples))
    if float(mods.min()) < min_modulus:
        raise ZeroOnContour(
            f"|f| drops to {mods.min():.3g} on the contour (threshold {min_modulus:g})"
        )
    res = contour_integrate(_log_derivative(f), loop, tol=tol)
    val = complex(res.value) / TWO_PI_I
    nearest = int(np.round(val.real))
    if abs(val - nearest) > integer_slack:
        raise NonIntegerResult(f"winding integral {val:.6g} is not near an integer")
    return nearest


def power_sums(f, loop: PathPolyline, count: int, tol: float = 1e-10) -> np.ndarray:
    """p_s = sum of z_k^s over the zeros z_k enclosed by the loop, s=1..count."""
    logd = _log_derivative(f)

    def integrand(z):
        z = np.asarray(z, dtype=np.complex128)
        ld = logd(z)
        return np.stack([z ** s * ld for s in range(1, count + 1)], axis=-1)

    res = contour_integrate(integrand, loop, tol=tol)
    return np.asarray(res.value) / TWO_PI_I


def locate_zeros(f, loop: PathPolyline, count: int, tol: float = 1e-10) -> np.ndarray:
    """Zeros (with multiplicity) of f inside the loop, given their number.

    Power sums feed Newton's identities; the reconstructed monic polynomial
    is solved by its companion matrix.
    """
    if count == 0:
        return np.empty(0, dtype=complex)
    p = power_sums(f, loop, count, tol=tol)
    e = np.zeros(count + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, count + 1):
        acc = 0.0 + 0.0j
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * p[i - 1]
        e[k] = acc / k
    coeffs = [(-1) ** k * e[k] for k in range(count + 1)]
    return np.roots(coeffs)


def _cell_loop(x0, x1, y0, y1) -> PathPolyline:
    corners = np.array([x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1, x0 + 1j * y0])
    return PathPolyline(corners, closed=True)


def find_zeros(
    f,
    bbox: Tuple[float, float, float, float],
    cell: float,
    inside=None,
    tol: float = 1e-9,
    max_depth: int = 4,
) -> List[Tuple[complex, int]]:
    """Search a box for zeros of f by winding numbers on a cell grid.

    ``inside`` optionally restricts the search to cells whose corners all
    satisfy the predicate.  Cells where |f| dips near zero on the contour
    are subdivided; unresolved slivers are skipped, which is acceptable for
    the interior zero bookkeeping this library needs.
    """
    xmin, xmax, ymin, ymax = bbox
    nx = max(1, int(np.ceil((xmax - xmin) / cell)))
    ny = max(1, int(np.ceil((ymax - ymin) / cell)))
    found: List[Tuple[complex, int]] = []

    def visit(x0, x1, y0, y1, depth):
        if inside is not None:
            corners = np.array([x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1])
            if not bool(np.all(inside(corners))):
                return
        loop = _cell_loop(x0, x1, y0, y1)
        try:
            n = winding_number(f, loop, tol=tol)
        except (ZeroOnContour, NonIntegerResult):
            if depth < max_depth:
                xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
                visit(x0, xm, y0, ym, depth + 1)
                visit(xm, x1, y0, ym, depth + 1)
                visit(x0, xm, ym, y1, depth + 1)
                visit(xm, x1, ym, y1, depth + 1)
            return
        if n > 0:
            roots = locate_zeros(f, loop, n, tol=tol)
            for r in roots:
                found.append((complex(r), 1))

    for i in range(nx):
        for j in range(ny):
            visit(
                xmin + i * cell, min(xmin + (i + 1) * cell, xmax),
                ymin + j * cell, min(ymin + (j + 1) * cell, ymax),
                0,
            )
    return _merge_roots(found)


def _merge_roots(found, merge_tol: float = 1e-7):
    merged: List[Tuple[complex, int]] = []
    for z, m in found:
        for idx, (w, k) in enumerate(merged):
            if abs(z - w) < merge_tol:
                merged[idx] = ((w * k + z * m) / (k + m), k + m)
                break
        else:
            merged.append((z, m))
    return merged
