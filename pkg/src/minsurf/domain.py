"""Planar domains (disc, annulus, wedge, rectangle) and polyline paths.

Every domain lives in the identity coordinate, so holomorphic 1-forms are
coefficients against dz.  Wedges are unbounded in principle; for meshing
they carry a truncation radius whose arc is tagged artificial and is
excluded from ideal-boundary distance computations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import InvariantViolation

CLOSURE_TOL = 1e-14


def _finite(arr) -> bool:
    a = np.asarray(arr)
    return bool(np.all(np.isfinite(a.view(np.float64) if np.iscomplexobj(a) else a)))


@dataclass(frozen=True)
class BoundaryCurve:
    """One smooth piece of a domain boundary, parametrized over [0, 1].

    ``kind`` is ``"circle"`` (center, radius, ccw flag) or ``"segment"``
    (endpoints a, b).  ``artificial`` marks truncation curves that do not
    belong to the ideal boundary.
    """

    kind: str
    params: tuple
    artificial: bool = False

    def point(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "circle":
            center, radius, t0, t1 = self.params
            ang = t0 + (t1 - t0) * t
            return center + radius * np.exp(1j * ang)
        if self.kind == "segment":
            a, b = self.params
            return a + (b - a) * t
        raise ValueError(f"unknown boundary curve kind {self.kind!r}")

    @property
    def length(self) -> float:
        if self.kind == "circle":
            _, radius, t0, t1 = self.params
            return abs(t1 - t0) * radius
        a, b = self.params
        return abs(b - a)

    def sample(self, spacing: float):
        n = max(2, int(np.ceil(self.length / spacing)) + 1)
        return self.point(np.linspace(0.0, 1.0, n))


class Domain:
    """Base class: containment tests, boundary description, homology rank."""

    kind = "domain"

    def contains(self, z, margin: float = 0.0):
        return self.boundary_margin(z) > margin

    def boundary_margin(self, z):
        """Distance to the boundary, positive inside, negative outside."""
        raise NotImplementedError

    def boundary_curves(self) -> List[BoundaryCurve]:
        raise NotImplementedError

    @property
    def betti(self) -> int:
        return 0

    def bbox(self):
        raise NotImplementedError

    def thickness(self) -> float:
        """Smallest cross-section; meshes need edges shorter than this."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        d = self.to_dict()
        if not _finite([v for v in d.values() if isinstance(v, (int, float))]):
            raise InvariantViolation("non-finite domain parameter")
        return json.dumps(d, sort_keys=True)

    def homology_representatives(self) -> List["PathPolyline"]:
        """One closed polyline per independent homology class."""
        return []


@dataclass(frozen=True)
class Disc(Domain):
    radius: float = 1.0
    kind = "disc"

    def __post_init__(self):
        if not self.radius > 0:
            raise InvariantViolation("disc requires radius > 0")

    def boundary_margin(self, z):
        return self.radius - np.abs(np.asarray(z, dtype=np.complex128))

    def boundary_curves(self):
        return [BoundaryCurve("circle", (0j, self.radius, 0.0, 2.0 * np.pi))]

    def bbox(self):
        r = self.radius
        return (-r, r, -r, r)

    def thickness(self):
        return 2.0 * self.radius

    def to_dict(self):
        return {"kind": "disc", "radius": self.radius}


@dataclass(frozen=True)
class Annulus(Domain):
    inner: float
    outer: float
    kind = "annulus"

    def __post_init__(self):
        if not (0 < self.inner < self.outer):
            raise InvariantViolation("annulus requires 0 < inner < outer")

    def boundary_margin(self, z):
        r = np.abs(np.asarray(z, dtype=np.complex128))
        return np.minimum(self.outer - r, r - self.inner)

    def boundary_curves(self):
        return [
            BoundaryCurve("circle", (0j, self.inner, 0.0, 2.0 * np.pi)),
            BoundaryCurve("circle", (0j, self.outer, 0.0, 2.0 * np.pi)),
        ]

    @property
    def betti(self):
        return 1

    def bbox(self):
        r = self.outer
        return (-r, r, -r, r)

    def thickness(self):
        return self.outer - self.inner

    def to_dict(self):
        return {"kind": "annulus", "inner": self.inner, "outer": self.outer}

    def homology_representatives(self):
        return [PathPolyline.circle(float(np.sqrt(self.inner * self.outer)))]


@dataclass(frozen=True)
class Wedge(Domain):
    """Sector around the positive imaginary axis with the given half-angle.

    ``half_angle = pi/4`` gives {Im z > |Re z|}.  The sector is truncated
    at ``truncation_radius`` for meshing; that arc is artificial.
    """

    half_angle: float = np.pi / 4
    truncation_radius: float = 10.0
    kind = "wedge"

    def __post_init__(self):
        if not (0 < self.half_angle < np.pi / 2):
            raise InvariantViolation("wedge half-angle must lie in (0, pi/2)")
        if not self.truncation_radius > 0:
            raise InvariantViolation("wedge truncation radius must be positive")

    def _ray_angles(self):
        return (np.pi / 2 - self.half_angle, np.pi / 2 + self.half_angle)

    def boundary_margin(self, z):
        z = np.asarray(z, dtype=np.complex128)
        x, y = z.real, z.imag
        lo, hi = self._ray_angles()
        # signed distances to the two boundary lines through the origin
        d_right = y * np.cos(lo) - x * np.sin(lo)
        d_left = x * np.sin(hi) - y * np.cos(hi)
        return np.minimum(np.minimum(d_right, d_left), self.truncation_radius - np.abs(z))

    def boundary_curves(self):
        lo, hi = self._ray_angles()
        r = self.truncation_radius
        return [
            BoundaryCurve("segment", (0j, r * np.exp(1j * lo))),
            BoundaryCurve("segment", (0j, r * np.exp(1j * hi))),
            BoundaryCurve("circle", (0j, r, lo, hi), artificial=True),
        ]

    def bbox(self):
        r = self.truncation_radius
        x = r * np.sin(self.half_angle)
        return (-x, x, 0.0, r)

    def thickness(self):
        return self.truncation_radius * np.sin(self.half_angle)

    def to_dict(self):
        return {
            "kind": "wedge",
            "half_angle": self.half_angle,
            "truncation_radius": self.truncation_radius,
        }


@dataclass(frozen=True)
class Rectangle(Domain):
    corner_min: complex
    corner_max: complex
    kind = "rectangle"

    def __post_init__(self):
        a, b = complex(self.corner_min), complex(self.corner_max)
        if not (a.real < b.real and a.imag < b.imag):
            raise InvariantViolation("rectangle corners must be ordered min < max componentwise")

    def boundary_margin(self, z):
        z = np.asarray(z, dtype=np.complex128)
        a, b = complex(self.corner_min), complex(self.corner_max)
        return np.minimum(
            np.minimum(z.real - a.real, b.real - z.real),
            np.minimum(z.imag - a.imag, b.imag - z.imag),
        )

    def boundary_curves(self):
        a, b = complex(self.corner_min), complex(self.corner_max)
        c1, c2, c3, c4 = a, complex(b.real, a.imag), b, complex(a.real, b.imag)
        return [
            BoundaryCurve("segment", (c1, c2)),
            BoundaryCurve("segment", (c2, c3)),
            BoundaryCurve("segment", (c3, c4)),
            BoundaryCurve("segment", (c4, c1)),
        ]

    def bbox(self):
        a, b = complex(self.corner_min), complex(self.corner_max)
        return (a.real, b.real, a.imag, b.imag)

    def thickness(self):
        a, b = complex(self.corner_min), complex(self.corner_max)
        return min(b.real - a.real, b.imag - a.imag)

    def to_dict(self):
        a, b = complex(self.corner_min), complex(self.corner_max)
        return {"kind": "rectangle", "corner_min": [a.real, a.imag], "corner_max": [b.real, b.imag]}


def domain_from_dict(d: dict) -> Domain:
    kind = d.get("kind")
    if kind == "disc":
        return Disc(d["radius"])
    if kind == "annulus":
        return Annulus(d["inner"], d["outer"])
    if kind == "wedge":
        return Wedge(d["half_angle"], d["truncation_radius"])
    if kind == "rectangle":
        return Rectangle(complex(*d["corner_min"]), complex(*d["corner_max"]))
    raise InvariantViolation(f"unknown domain kind {kind!r}")


@dataclass(frozen=True)
class PathPolyline:
    """Ordered polyline in the plane; carrier for cycles and integration paths."""

    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.complex128)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 1 or v.size < 2:
            raise InvariantViolation("polyline needs at least two vertices")
        if not _finite(v):
            raise InvariantViolation("polyline vertices must be finite")
        if self.closed and abs(v[0] - v[-1]) > CLOSURE_TOL * max(1.0, float(np.max(np.abs(v)))):
            raise InvariantViolation("closed polyline must end where it starts")

    @classmethod
    def circle(cls, radius: float, center: complex = 0j, n: int = 128, clockwise: bool = False) -> "PathPolyline":
        ang = np.linspace(0.0, 2.0 * np.pi, n + 1)
        if clockwise:
            ang = ang[::-1]
        pts = center + radius * np.exp(1j * ang)
        pts[-1] = pts[0]
        return cls(pts, closed=True)

    @classmethod
    def line(cls, a: complex, b: complex, n: int = 1) -> "PathPolyline":
        t = np.linspace(0.0, 1.0, n + 1)
        return cls(a + (b - a) * t, closed=False)

    def reversed(self) -> "PathPolyline":
        return PathPolyline(self.vertices[::-1].copy(), closed=self.closed)

    def segments(self):
        return self.vertices[:-1], self.vertices[1:]

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.vertices))))

    def winding_around(self, a: complex) -> int:
        """Winding number of a closed polyline about the point ``a``."""
        if not self.closed:
            raise InvariantViolation("winding number needs a closed polyline")
        rel = self.vertices - a
        if np.min(np.abs(rel)) == 0.0:
            raise InvariantViolation("winding point lies on the polyline")
        turns = np.angle(rel[1:] / rel[:-1])
        return int(np.round(np.sum(turns) / (2.0 * np.pi)))

    def check_inside(self, domain: Domain, margin: float = -1e-12):
        if not bool(np.all(domain.contains(self.vertices, margin=margin))):
            raise InvariantViolation("polyline leaves the host domain")

    def to_dict(self):
        return {
            "vertices": [[float(v.real), float(v.imag)] for v in self.vertices],
            "closed": self.closed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PathPolyline":
        verts = np.array([complex(a, b) for a, b in d["vertices"]])
        return cls(verts, closed=bool(d["closed"]))

    def concat(self, other: "PathPolyline") -> "PathPolyline":
        if abs(self.vertices[-1] - other.vertices[0]) > 1e-12:
            raise InvariantViolation("paths do not share an endpoint")
        return PathPolyline(np.concatenate([self.vertices, other.vertices[1:]]), closed=False)
