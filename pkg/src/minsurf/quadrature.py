"""Certified complex line integrals along polylines.

The engine is adaptive composite Gauss-Kronrod (G7/K15) per straight
segment with a per-component absolute error budget.  Segments are always
integrated in a canonical orientation and sign-flipped on traversal, so
reversing a path negates the result exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .domain import Domain, PathPolyline
from .errors import EvaluationOutsideDomain, NonConvergent, TooCloseToBoundary
from .expr import HolomorphicFn

# Kronrod-15 abscissae on [-1, 1] and weights; the odd-indexed abscissae
# form the embedded Gauss-7 rule.
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])
_GAUSS_IDX = np.arange(1, 15, 2)


def as_vector_form(form) -> tuple[Callable, int]:
    """Normalize a form input to ``f(z: (m,)) -> (m, k)`` plus its width k.

    Accepts objects with ``evaluate`` (coefficient tuples), HolomorphicFn,
    plain callables, or sequences of any of those.
    """
    if hasattr(form, "evaluate"):
        fn = form.evaluate
        k = form.dimension
        return fn, k
    if isinstance(form, (list, tuple)):
        comps = [c if callable(c) else HolomorphicFn.from_expression(c) for c in form]

        def stacked(z):
            z = np.asarray(z, dtype=np.complex128)
            return np.stack([np.broadcast_to(np.asarray(c(z), dtype=np.complex128), z.shape) for c in comps], axis=-1)

        return stacked, len(comps)
    if callable(form):
        probe = np.asarray(form(np.array([0.5 + 0.5j, 0.25 + 0.75j])))
        if probe.ndim == 1:
            def wrapped(z, _f=form):
                z = np.asarray(z, dtype=np.complex128)
                return np.asarray(_f(z), dtype=np.complex128).reshape(z.shape + (1,))

            return wrapped, 1
        return (lambda z, _f=form: np.asarray(_f(np.asarray(z, dtype=np.complex128)), dtype=np.complex128)), int(probe.shape[-1])
    raise TypeError(f"cannot interpret {form!r} as an integrand")


@dataclass
class QuadratureResult:
    value: np.ndarray
    error: np.ndarray
    evaluations: int
    scalar: bool = False

    def __post_init__(self):
        if self.scalar:
            self.value = complex(self.value.reshape(-1)[0])
            self.error = float(self.error.reshape(-1)[0])


def _segment_adaptive(f, k, a, b, tol, max_panels):
    """Integrate f over the straight segment [a, b] to absolute tol per component."""
    direction = b - a
    t0 = np.array([0.0])
    t1 = np.array([1.0])
    done_val = np.zeros(k, dtype=np.complex128)
    done_err = np.zeros(k, dtype=np.float64)
    evals = 0
    panels = 0
    while t0.size:
        panels += t0.size
        if panels > max_panels:
            raise NonConvergent(
                f"quadrature budget exhausted on segment ({a:.6g} -> {b:.6g}); "
                f"{panels} panels, tol={tol:g}"
            )
        half = 0.5 * (t1 - t0)
        mid = 0.5 * (t0 + t1)
        z = a + direction * (mid[:, None] + half[:, None] * _XK[None, :])
        vals = f(z.reshape(-1)).reshape(z.shape + (k,))
        evals += z.size
        scale = (direction * half)[:, None]
        i15 = scale * np.tensordot(vals, _WK, axes=(1, 0))
        i7 = scale * np.tensordot(vals[:, _GAUSS_IDX, :], _WG, axes=(1, 0))
        err = np.abs(i15 - i7)
        # a panel is accepted once its error fits its share of the budget
        share = tol * (t1 - t0)
        ok = np.max(err - share[:, None], axis=1) <= 0.0
        tiny = (t1 - t0) < 1e-12
        accept = ok | tiny
        if np.any(tiny & ~ok):
            raise NonConvergent(f"quadrature stalled on segment ({a:.6g} -> {b:.6g})")
        done_val += i15[accept].sum(axis=0)
        done_err += err[accept].sum(axis=0)
        t0r, t1r = t0[~accept], t1[~accept]
        midr = 0.5 * (t0r + t1r)
        t0 = np.concatenate([t0r, midr])
        t1 = np.concatenate([midr, t1r])
    return done_val, done_err, evals


def contour_integrate(
    form,
    path: PathPolyline,
    tol: float = 1e-10,
    domain: Optional[Domain] = None,
    max_panels_per_segment: int = 4096,
) -> QuadratureResult:
    """Integrate a coefficient form against dz along a polyline.

    Error control is per component: the reported error estimate is below
    ``tol`` on success, otherwise NonConvergent is raised.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f, k = as_vector_form(form)
    scalar = not hasattr(form, "evaluate") and not isinstance(form, (list, tuple)) and k == 1
    starts, ends = path.segments()
    lengths = np.abs(ends - starts)
    total_len = float(lengths.sum())
    if total_len == 0.0:
        return QuadratureResult(np.zeros(k, dtype=complex), np.zeros(k), 0, scalar)
    if domain is not None:
        probe = np.concatenate([path.vertices, 0.5 * (starts + ends)])
        if not np.all(domain.contains(probe, margin=-1e-9)):
            raise EvaluationOutsideDomain("integration path leaves the domain")
    value = np.zeros(k, dtype=np.complex128)
    error = np.zeros(k, dtype=np.float64)
    evals = 0
    for a, b, ln in zip(starts, ends, lengths):
        if ln == 0.0:
            continue
        seg_tol = tol * ln / total_len
        # canonical orientation makes reversal an exact negation
        if (b.real, b.imag) < (a.real, a.imag):
            v, e, ne = _segment_adaptive(f, k, b, a, seg_tol, max_panels_per_segment)
            v = -v
        else:
            v, e, ne = _segment_adaptive(f, k, a, b, seg_tol, max_panels_per_segment)
        value += v
        error += e
        evals += ne
    return QuadratureResult(value, error, evals, scalar)


def path_integrate(
    form,
    p0: complex,
    p1: complex,
    mesh,
    tol: float = 1e-10,
    via: Optional[complex] = None,
    domain: Optional[Domain] = None,
) -> QuadratureResult:
    """Integrate from p0 to p1 along a mesh-guided polyline.

    The polyline follows the Euclidean-shortest mesh path between the
    vertices nearest the endpoints (optionally forced through ``via``),
    so it stays inside non-convex domains.
    """
    waypoints = [complex(p0)] + ([complex(via)] if via is not None else []) + [complex(p1)]
    pieces = []
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        ia, ib = mesh.vertex_nearest(a), mesh.vertex_nearest(b)
        chain = mesh.shortest_vertex_path(ia, ib)
        pts = [a] + [complex(v) for v in mesh.points[chain]] + [b]
        pieces.extend(pts if not pieces else pts[1:])
    dedup = [pieces[0]]
    for p in pieces[1:]:
        if abs(p - dedup[-1]) > 1e-14:
            dedup.append(p)
    if len(dedup) < 2:
        dedup.append(dedup[-1])
    poly = PathPolyline(np.array(dedup), closed=False)
    return contour_integrate(form, poly, tol=tol, domain=domain)


def cauchy_derivative(fn, p: complex, radius: float, rel_tol: float = 1e-10, max_nodes: int = 2048) -> complex:
    """Derivative by Cauchy's integral over a circle of the given radius.

    Trapezoid sums on the circle converge spectrally for holomorphic
    integrands; node count doubles until two refinements agree.
    """
    p = complex(p)
    prev = None
    m = 32
    while m <= max_nodes:
        theta = 2.0 * np.pi * np.arange(m) / m
        z = p + radius * np.exp(1j * theta)
        est = complex(np.mean(fn(z) * np.exp(-1j * theta)) / radius)
        if prev is not None and abs(est - prev) <= rel_tol * max(1.0, abs(est)):
            return est
        prev = est
        m *= 2
    raise NonConvergent(f"Cauchy derivative estimate did not settle at p={p:.6g}")


def derivative_at(
    f,
    p: complex,
    domain: Optional[Domain] = None,
    radius: Optional[float] = None,
    radius_cap: float = 0.1,
) -> complex:
    """Derivative of a holomorphic function at an interior point.

    Uses the closed-form derivative when the function carries one, else a
    Cauchy-integral estimate on a circle of radius half the distance to
    the boundary, capped at ``radius_cap``.
    """
    if isinstance(f, HolomorphicFn) and f.has_derivative:
        return complex(f.derivative()(np.complex128(p)))
    if radius is None:
        if domain is not None:
            margin = float(domain.boundary_margin(p))
            if margin <= 1e-9:
                raise TooCloseToBoundary(f"point {p:.6g} has boundary margin {margin:.3g}")
            radius = min(0.5 * margin, radius_cap)
        else:
            radius = radius_cap
    return cauchy_derivative(f, p, radius)


def cycle_tolerance_for(tol: float, cycles: Sequence[PathPolyline]) -> float:
    """Split a global tolerance across a family of cycles."""
    n = max(1, len(cycles))
    return tol / n
