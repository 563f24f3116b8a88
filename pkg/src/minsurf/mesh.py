"""Graph meshes of planar domains for path guidance and geodesic estimates.

A mesh is a square lattice (with diagonals) clipped to the domain, plus
vertices sampled directly on every boundary curve.  Lattice anchors are
fixed at integer multiples of the spacing, so halving the target edge
length produces a nested refinement: every coarse vertex and every coarse
edge (as a two-hop collinear pair) survives in the fine mesh.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .domain import Domain, PathPolyline
from .errors import DegenerateDomain, InvariantViolation, PathNotFound

_OFFSETS = np.array([(1, 0), (0, 1), (1, 1), (1, -1)])
INTERIOR_MARGIN = 1e-9


@dataclass
class Mesh:
    domain: Domain
    target_edge: float
    spacing: float
    level: int
    points: np.ndarray          # (V,) complex
    edges: np.ndarray           # (E, 2) int32, undirected, deduplicated
    edge_lengths: np.ndarray    # (E,) float
    boundary: np.ndarray        # (V,) bool
    artificial: np.ndarray     # (V,) bool, subset of boundary
    curve_index: np.ndarray     # (V,) int32, -1 for interior vertices
    grid_count: int             # first grid_count vertices are lattice points
    grid_ij: np.ndarray         # (grid_count, 2) lattice indices
    _tree: Optional[cKDTree] = field(default=None, repr=False)
    _csr: Optional[sparse.csr_matrix] = field(default=None, repr=False)

    @property
    def vertex_count(self) -> int:
        return self.points.size

    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(np.column_stack([self.points.real, self.points.imag]))
        return self._tree

    def euclid_csr(self) -> sparse.csr_matrix:
        if self._csr is None:
            self._csr = self.weighted_csr(self.edge_lengths)
        return self._csr

    def weighted_csr(self, weights: np.ndarray) -> sparse.csr_matrix:
        i, j = self.edges[:, 0], self.edges[:, 1]
        v = self.vertex_count
        m = sparse.coo_matrix(
            (np.concatenate([weights, weights]), (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(v, v),
        )
        return m.tocsr()

    def vertex_nearest(self, p: complex) -> int:
        _, idx = self.tree().query([complex(p).real, complex(p).imag])
        return int(idx)

    def shortest_vertex_path(self, i: int, j: int) -> List[int]:
        """Euclidean-shortest chain of vertex indices from i to j."""
        if i == j:
            return [i]
        dist, pred = csgraph.dijkstra(self.euclid_csr(), indices=i, return_predecessors=True)
        if not np.isfinite(dist[j]):
            raise PathNotFound(f"mesh vertices {i} and {j} are not connected")
        chain = [j]
        while chain[-1] != i:
            chain.append(int(pred[chain[-1]]))
        return chain[::-1]

    def edge_midpoints(self) -> np.ndarray:
        a = self.points[self.edges[:, 0]]
        b = self.points[self.edges[:, 1]]
        return 0.5 * (a + b)

    def edge_gauss_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Two-point Gauss nodes along each edge (for metric edge weights)."""
        a = self.points[self.edges[:, 0]]
        b = self.points[self.edges[:, 1]]
        mid = 0.5 * (a + b)
        off = (b - a) * (0.5 / np.sqrt(3.0))
        return mid - off, mid + off

    def component_count(self) -> int:
        n, _ = csgraph.connected_components(self.euclid_csr(), directed=False)
        return int(n)

    def validate(self):
        if np.any(self.edge_lengths <= 0.0):
            raise InvariantViolation("mesh contains a zero-length edge")
        if float(self.edge_lengths.max()) > self.target_edge * (1.0 + 1e-9):
            raise InvariantViolation("mesh edge exceeds the target edge length")
        if self.component_count() != 1:
            raise InvariantViolation("mesh graph is disconnected")
        margin = self.domain.boundary_margin(self.points[self.boundary])
        if margin.size and float(np.max(np.abs(margin))) > self.target_edge:
            raise InvariantViolation("boundary vertex strays from the boundary")

    def triangles(self) -> np.ndarray:
        """Triangulation of the lattice part (two triangles per full cell)."""
        ij = self.grid_ij
        lookup = {(int(a), int(b)): idx for idx, (a, b) in enumerate(ij)}
        tris = []
        for a, b in ij:
            a, b = int(a), int(b)
            v00 = lookup.get((a, b))
            v10 = lookup.get((a + 1, b))
            v01 = lookup.get((a, b + 1))
            v11 = lookup.get((a + 1, b + 1))
            if None not in (v00, v10, v01, v11):
                tris.append((v00, v10, v11))
                tris.append((v00, v11, v01))
        return np.asarray(tris, dtype=np.int64).reshape(-1, 3)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "target_edge": self.target_edge,
            "level": self.level,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "edges": self.edges.tolist(),
            "boundary": self.boundary.astype(int).tolist(),
            "artificial": self.artificial.astype(int).tolist(),
            "curve_index": self.curve_index.tolist(),
        }


def _boundary_samples(domain: Domain, target_edge: float):
    """Sample boundary curves with dyadic counts so refinements nest."""
    pts, curve_ids, artificial = [], [], []
    for ci, curve in enumerate(domain.boundary_curves()):
        n = max(2, int(2 ** np.ceil(np.log2(max(1.0, curve.length / (0.5 * target_edge))))) + 1)
        t = np.linspace(0.0, 1.0, n)
        p = curve.point(t)
        pts.append(p)
        curve_ids.append(np.full(p.size, ci, dtype=np.int32))
        artificial.append(np.full(p.size, curve.artificial, dtype=bool))
    return np.concatenate(pts), np.concatenate(curve_ids), np.concatenate(artificial)


def build_mesh(domain: Domain, target_edge: float, level: int = 0) -> Mesh:
    """Build a connected mesh with maximum edge length <= target_edge."""
    if target_edge <= 0:
        raise DegenerateDomain("target edge length must be positive")
    if target_edge >= domain.thickness():
        raise DegenerateDomain(
            f"target edge {target_edge:g} is not below the domain thickness {domain.thickness():g}"
        )
    s = target_edge / np.sqrt(2.0)
    xmin, xmax, ymin, ymax = domain.bbox()
    i0, i1 = int(np.floor(xmin / s)) - 1, int(np.ceil(xmax / s)) + 1
    j0, j1 = int(np.floor(ymin / s)) - 1, int(np.ceil(ymax / s)) + 1
    ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
    grid_z = ii * s + 1j * jj * s
    inside = np.asarray(domain.contains(grid_z, margin=INTERIOR_MARGIN))
    idx = -np.ones(grid_z.shape, dtype=np.int64)
    idx[inside] = np.arange(int(inside.sum()))
    grid_pts = grid_z[inside]
    grid_ij = np.column_stack([ii[inside], jj[inside]])
    g = grid_pts.size

    edge_list = []
    for dx, dy in _OFFSETS:
        a = idx[max(0, -dx): idx.shape[0] - max(0, dx) or None,
                max(0, -dy): idx.shape[1] - max(0, dy) or None]
        b = idx[max(0, dx): idx.shape[0] - max(0, -dx) or None,
                max(0, dy): idx.shape[1] - max(0, -dy) or None]
        ok = (a >= 0) & (b >= 0)
        edge_list.append(np.column_stack([a[ok], b[ok]]))
    edges = np.concatenate(edge_list) if edge_list else np.empty((0, 2), dtype=np.int64)

    b_pts, b_curve, b_art = _boundary_samples(domain, target_edge)
    points = np.concatenate([grid_pts, b_pts])
    boundary = np.zeros(points.size, dtype=bool)
    boundary[g:] = True
    artificial = np.zeros(points.size, dtype=bool)
    artificial[g:] = b_art
    curve_index = np.full(points.size, -1, dtype=np.int32)
    curve_index[g:] = b_curve

    # chain consecutive samples along each curve, then hook the chains to
    # nearby lattice vertices
    b_ids = np.arange(g, points.size)
    chain = np.column_stack([b_ids[:-1], b_ids[1:]])
    same_curve = b_curve[:-1] == b_curve[1:]
    extra = [edges, chain[same_curve]]
    if g:
        tree = cKDTree(np.column_stack([grid_pts.real, grid_pts.imag]))
        pairs = tree.query_ball_point(np.column_stack([b_pts.real, b_pts.imag]), r=target_edge)
        links = [(g + bi, gi) for bi, near in enumerate(pairs) for gi in near]
        if links:
            extra.append(np.asarray(links, dtype=np.int64))
    edges = np.concatenate(extra)

    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    edges = np.unique(np.column_stack([lo, hi]), axis=0)
    lengths = np.abs(points[edges[:, 0]] - points[edges[:, 1]])
    keep = lengths > 1e-13
    edges, lengths = edges[keep], lengths[keep]

    mesh = Mesh(
        domain=domain,
        target_edge=float(target_edge),
        spacing=float(s),
        level=level,
        points=points,
        edges=edges.astype(np.int32),
        edge_lengths=lengths,
        boundary=boundary,
        artificial=artificial,
        curve_index=curve_index,
        grid_count=g,
        grid_ij=grid_ij,
    )
    n_comp, labels = csgraph.connected_components(mesh.euclid_csr(), directed=False)
    if n_comp != 1:
        # isolated slivers can appear next to tangent boundaries; drop them
        # only when they are a negligible fraction, otherwise refuse
        counts = np.bincount(labels)
        main = int(np.argmax(counts))
        if counts[main] < 0.999 * points.size:
            raise DegenerateDomain(
                f"mesh disconnected ({n_comp} components); refine the target edge length"
            )
        keep_v = labels == main
        remap = -np.ones(points.size, dtype=np.int64)
        remap[keep_v] = np.arange(int(keep_v.sum()))
        keep_e = keep_v[edges[:, 0]] & keep_v[edges[:, 1]]
        mesh = Mesh(
            domain=domain,
            target_edge=float(target_edge),
            spacing=float(s),
            level=level,
            points=points[keep_v],
            edges=remap[edges[keep_e]].astype(np.int32),
            edge_lengths=lengths[keep_e],
            boundary=boundary[keep_v],
            artificial=artificial[keep_v],
            curve_index=curve_index[keep_v],
            grid_count=int(keep_v[:g].sum()),
            grid_ij=grid_ij[keep_v[:g]],
        )
    return mesh


def refinement_family(domain: Domain, coarsest_edge: float, levels: int) -> List[Mesh]:
    """Meshes at target edges coarsest, coarsest/2, ..., coarsest/2**(levels-1)."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    return [build_mesh(domain, coarsest_edge / 2 ** k, level=k) for k in range(levels)]
