"""Structured triangulations of the unit-square reference domain.

Meshes are uniform diagonal-split triangulations of [0, L]^2 with tagged
boundary facets.  All diagonals share the same orientation (lower-left to
upper-right), so uniform midpoint refinement of ``build_uniform_square_mesh(L, n)``
reproduces ``build_uniform_square_mesh(L, 2n)`` up to entity numbering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIRICHLET_SOLID = 1
NEUMANN_SOLID = 2

_TAG_NAMES = {DIRICHLET_SOLID: "dirichlet", NEUMANN_SOLID: "neumann"}

# Local edge k of a cell joins local vertices k and (k+1) % 3.
_EDGE_VERTS = ((0, 1), (1, 2), (2, 0))


class MeshError(ValueError):
    """Invalid mesh construction argument."""


@dataclass(frozen=True)
class Mesh:
    """Conforming triangulation with boundary facet tags.

    Attributes
    ----------
    vertices : (V, 2) float array of coordinates (m).
    cells : (C, 3) int array of counterclockwise vertex triples.
    facets : (F, 2) int array of boundary entries (cell, local edge).
    facet_tags : (F,) int array, DIRICHLET_SOLID or NEUMANN_SOLID.
    h : max cell diameter (longest edge over all cells).
    """

    vertices: np.ndarray
    cells: np.ndarray
    facets: np.ndarray
    facet_tags: np.ndarray
    h: float

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_cells(self):
        return self.cells.shape[0]


def build_uniform_square_mesh(L=1.0, n=4, tag_rule=None):
    """Triangulate [0, L]^2 into 2*n^2 cells with (n+1)^2 vertices.

    Each of the n^2 squares is split along the diagonal from its lower-left
    to its upper-right corner.  ``tag_rule`` maps a facet midpoint (2,) to a
    boundary tag; the default tags every facet DIRICHLET_SOLID.
    """
    if n < 1:
        raise MeshError(f"invalid-argument: n must be >= 1, got {n}")
    if L <= 0:
        raise MeshError(f"invalid-argument: L must be > 0, got {L}")

    xs = np.linspace(0.0, L, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    cells = np.empty((2 * n * n, 3), dtype=np.int64)
    k = 0
    for j in range(n):
        for i in range(n):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            cells[k] = (v00, v10, v11)      # lower triangle
            cells[k + 1] = (v00, v11, v01)  # upper triangle
            k += 2

    facets = _boundary_entries(cells)
    facet_tags = _apply_tag_rule(vertices, cells, facets, tag_rule)
    h = L * np.sqrt(2.0) / n
    return Mesh(vertices, cells, facets, facet_tags, h)


def refine_uniform(mesh):
    """Split every cell into 4 congruent children through edge midpoints."""
    vertices = mesh.vertices
    cells = mesh.cells
    edges, cell_edges, _ = _edge_structure(cells)

    mid = 0.5 * (vertices[edges[:, 0]] + vertices[edges[:, 1]])
    new_vertices = np.vstack([vertices, mid])
    m = vertices.shape[0] + cell_edges  # (C, 3) midpoint vertex ids

    C = cells.shape[0]
    new_cells = np.empty((4 * C, 3), dtype=np.int64)
    v0, v1, v2 = cells[:, 0], cells[:, 1], cells[:, 2]
    m01, m12, m20 = m[:, 0], m[:, 1], m[:, 2]
    new_cells[0::4] = np.column_stack([v0, m01, m20])
    new_cells[1::4] = np.column_stack([m01, v1, m12])
    new_cells[2::4] = np.column_stack([m20, m12, v2])
    new_cells[3::4] = np.column_stack([m01, m12, m20])

    # Child facets covering parent facet (c, e); tags inherited.
    child_of_edge = {0: ((0, 0), (1, 0)), 1: ((1, 1), (2, 1)), 2: ((2, 2), (0, 2))}
    new_facets = []
    new_tags = []
    for (c, e), tag in zip(mesh.facets, mesh.facet_tags):
        for child, ce in child_of_edge[int(e)]:
            new_facets.append((4 * c + child, ce))
            new_tags.append(tag)
    new_facets = np.array(new_facets, dtype=np.int64)
    new_tags = np.array(new_tags, dtype=np.int64)

    return Mesh(new_vertices, new_cells, new_facets, new_tags, mesh.h / 2.0)


def boundary_facets(mesh, tag):
    """Facets carrying ``tag`` with their outward unit normals and lengths.

    Returns (facets (m, 2), normals (m, 2), lengths (m,)).
    """
    if tag not in _TAG_NAMES:
        raise MeshError(f"invalid-argument: unknown tag {tag!r}")
    mask = mesh.facet_tags == tag
    facets = mesh.facets[mask]
    normals = np.empty((facets.shape[0], 2))
    lengths = np.empty(facets.shape[0])
    for k, (c, e) in enumerate(facets):
        a, b = _EDGE_VERTS[int(e)]
        pa, pb = mesh.vertices[mesh.cells[c, a]], mesh.vertices[mesh.cells[c, b]]
        t = pb - pa
        ln = np.hypot(t[0], t[1])
        # CCW cells: rotating the edge tangent by -90 deg points outward.
        normals[k] = (t[1] / ln, -t[0] / ln)
        lengths[k] = ln
    return facets, normals, lengths


def cell_areas(mesh):
    """Signed areas of all cells (positive for CCW cells)."""
    p = mesh.vertices[mesh.cells]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def max_edge_length(mesh):
    p = mesh.vertices[mesh.cells]
    lengths = [np.linalg.norm(p[:, b] - p[:, a], axis=1) for a, b in _EDGE_VERTS]
    return float(np.max(lengths))


def dump_mesh(mesh, path):
    """Write the plain-text dump: header, vertices, cells, boundary facets."""
    with open(path, "w", encoding="ascii") as f:
        f.write(f"vertices {mesh.n_vertices} cells {mesh.n_cells}\n")
        for x, y in mesh.vertices:
            f.write(f"{x!r} {y!r}\n")
        for i, j, k in mesh.cells:
            f.write(f"{i} {j} {k}\n")
        for (c, e), tag in zip(mesh.facets, mesh.facet_tags):
            f.write(f"{c} {e} {_TAG_NAMES[int(tag)]}\n")


def _edge_structure(cells):
    """Global edge numbering.

    Returns (edges (E, 2) with sorted vertex pairs, cell_edges (C, 3),
    cell_edge_flip (C, 3) bool, True where the local direction opposes the
    global low-to-high orientation).
    """
    C = cells.shape[0]
    pairs = np.empty((3 * C, 2), dtype=np.int64)
    for e, (a, b) in enumerate(_EDGE_VERTS):
        pairs[e::3, 0] = cells[:, a]
        pairs[e::3, 1] = cells[:, b]
    flip = pairs[:, 0] > pairs[:, 1]
    spairs = np.where(flip[:, None], pairs[:, ::-1], pairs)
    edges, inverse = np.unique(spairs, axis=0, return_inverse=True)
    cell_edges = inverse.reshape(C, 3)
    cell_edge_flip = flip.reshape(C, 3)
    return edges, cell_edges, cell_edge_flip


def _boundary_entries(cells):
    """Boundary facets as (cell, local edge), found by edge-use counting."""
    _, cell_edges, _ = _edge_structure(cells)
    counts = np.bincount(cell_edges.ravel())
    entries = [
        (c, e)
        for c in range(cells.shape[0])
        for e in range(3)
        if counts[cell_edges[c, e]] == 1
    ]
    return np.array(entries, dtype=np.int64)


def _apply_tag_rule(vertices, cells, facets, tag_rule):
    tags = np.full(facets.shape[0], DIRICHLET_SOLID, dtype=np.int64)
    if tag_rule is not None:
        for k, (c, e) in enumerate(facets):
            a, b = _EDGE_VERTS[int(e)]
            midpoint = 0.5 * (vertices[cells[c, a]] + vertices[cells[c, b]])
            tags[k] = tag_rule(midpoint)
    return tags
