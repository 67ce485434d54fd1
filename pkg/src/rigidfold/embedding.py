"""3D folded forms from fold angles via spanning-tree facet rotations.

The root facet keeps its pattern coordinates in the z = 0 plane; every other
facet is placed by composing rotations about the creases on its tree path.
Rotation axes run along the shared crease, directed clockwise with respect to
the parent facet, which makes positive (valley) fold angles rotate the child
toward +z for a counterclockwise parent.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import assemble_global
from .pattern import MOUNTAIN, VALLEY

EMBED_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class TreeEdge:
    facet: int
    parent: int
    crease: int
    axis: tuple  # (a, b): rotation axis from vertex a to vertex b, flat coords


@dataclass(frozen=True)
class SpanningTree:
    root: int
    edges: tuple  # TreeEdge in breadth-first order

    @property
    def n_facets(self):
        return len(self.edges) + 1


@dataclass(frozen=True)
class Embedding3D:
    coords: np.ndarray  # (n_vertices, 3)
    root: int
    provenance: dict = field(default_factory=dict)


def build_spanning_tree(p, root=0):
    """Breadth-first spanning tree over facet adjacency, rooted at a facet."""
    if not 0 <= root < len(p.facets):
        raise ValueError(f"root facet {root} out of range")
    adjacency = {}
    for fi, fj, crease in p.facet_adjacency():
        adjacency.setdefault(fi, []).append((fj, crease))
        adjacency.setdefault(fj, []).append((fi, crease))
    for neighbors in adjacency.values():
        neighbors.sort()
    edges = []
    seen = {root}
    queue = [root]
    while queue:
        parent = queue.pop(0)
        for child, crease in adjacency.get(parent, ()):
            if child in seen:
                continue
            seen.add(child)
            queue.append(child)
            edges.append(
                TreeEdge(
                    facet=child,
                    parent=parent,
                    crease=crease,
                    axis=_clockwise_axis(p, parent, crease),
                )
            )
    if len(seen) != len(p.facets):
        raise ValueError("facet adjacency graph is disconnected")
    return SpanningTree(root=root, edges=tuple(edges))


def _clockwise_axis(p, parent, crease):
    """Axis (a, b) of a crease, clockwise around the parent facet.

    The parent's counterclockwise cycle traverses the shared edge in one
    direction; the rotation axis is the reverse of that direction.
    """
    u, v = p.creases[crease].key
    cycle = p.facets[parent]
    n = len(cycle)
    for i in range(n):
        if cycle[i] == u and cycle[(i + 1) % n] == v:
            return (v, u)
        if cycle[i] == v and cycle[(i + 1) % n] == u:
            return (u, v)
    raise ValueError(f"crease {crease} not on facet {parent}")


def rodrigues(angle, axis):
    """Proper rotation by ``angle`` about the unit 3-vector ``axis``."""
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"rotation axis is not unit length (|e| = {norm})")
    c, s = math.cos(angle), math.sin(angle)
    kx, ky, kz = axis
    k = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def embed(p, rho, root=0, check=True):
    """Isometric 3D embedding of a compatible fold state.

    Rejects incompatible states: the spanning tree silently drops the loop
    constraints, so embedding an incompatible state would tear the mesh.
    """
    rho = np.asarray(rho, dtype=float)
    if check and p.interior_vertex_ids:
        gc = assemble_global(p, rho)
        if gc.normalized_residual >= EMBED_RESIDUAL_TOL:
            raise ValueError(
                f"fold state incompatible (residual {gc.normalized_residual:.3e})"
            )
    tree = build_spanning_tree(p, root)
    flat = np.hstack([p.vertices, np.zeros((len(p.vertices), 1))])
    rotations = {tree.root: np.eye(3)}
    offsets = {tree.root: np.zeros(3)}
    for edge in tree.edges:
        a, b = edge.axis
        direction = flat[b] - flat[a]
        direction = direction / np.linalg.norm(direction)
        local = rodrigues(rho[edge.crease], direction)
        r_parent, t_parent = rotations[edge.parent], offsets[edge.parent]
        rotations[edge.facet] = r_parent @ local
        offsets[edge.facet] = (
            r_parent @ (flat[a] - local @ flat[a]) + t_parent
        )
    coords = np.full((len(p.vertices), 3), np.nan)
    for f in [tree.root] + [e.facet for e in tree.edges]:
        r, t = rotations[f], offsets[f]
        for v in p.facets[f]:
            if np.isnan(coords[v, 0]):
                coords[v] = r @ flat[v] + t
    return Embedding3D(
        coords=coords,
        root=root,
        provenance={"root": root, "state_hash": hash(rho.tobytes())},
    )


def _facet_normal(coords, cycle):
    """Newell normal of a (near planar) facet, unit length."""
    n = np.zeros(3)
    m = len(cycle)
    for i in range(m):
        u = coords[cycle[i]]
        v = coords[cycle[(i + 1) % m]]
        n += np.cross(u, v)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise ValueError("degenerate facet normal")
    return n / norm


def dihedral_angles(p, e):
    """Fold angle per crease measured from an embedding, valley positive.

    Near the fully folded state the sine of the angle is numerically
    ambiguous; the stored assignment then decides the sign.
    """
    coords = e.coords
    left = {}
    right = {}
    for f, cycle in enumerate(p.facets):
        n = len(cycle)
        for i in range(n):
            u, v = cycle[i], cycle[(i + 1) % n]
            key = tuple(sorted((u, v)))
            if key in p.crease_index:
                if (u, v) == key:
                    left[key] = f
                else:
                    right[key] = f
    rho = np.zeros(p.n_creases)
    for key, idx in p.crease_index.items():
        a, b = key
        axis = coords[b] - coords[a]
        axis = axis / np.linalg.norm(axis)
        n_left = _facet_normal(coords, p.facets[left[key]])
        n_right = _facet_normal(coords, p.facets[right[key]])
        cos_rho = float(np.clip(np.dot(n_left, n_right), -1.0, 1.0))
        sin_rho = float(np.dot(np.cross(n_right, n_left), axis))
        if abs(sin_rho) < 1e-9 and cos_rho < 0:
            kind = p.creases[idx].assignment
            sign = 1.0 if kind == VALLEY else -1.0 if kind == MOUNTAIN else math.copysign(1.0, sin_rho)
            rho[idx] = sign * math.acos(cos_rho)
        else:
            rho[idx] = math.atan2(sin_rho, cos_rho)
    return rho


def measure_dimensions(e):
    """Axis-aligned bounding box extents (L, W, H) of the embedded form."""
    spans = e.coords.max(axis=0) - e.coords.min(axis=0)
    return float(spans[0]), float(spans[1]), float(spans[2])


def poisson_ratio(history):
    """Discrete in-plane Poisson ratio series from (L, W) samples.

    Each consecutive pair yields -((L2-L1)/L1) / ((W2-W1)/W1); a vanishing
    width change produces a gap marker (None) instead of a number.
    """
    if len(history) < 2:
        raise ValueError("need at least two (L, W) samples")
    out = []
    for (l1, w1), (l2, w2) in zip(history, history[1:]):
        dw = (w2 - w1) / w1
        if dw == 0.0:
            out.append(None)
        else:
            out.append(-((l2 - l1) / l1) / dw)
    return out


def waterbomb_theta(p, e):
    """Apex angle of a symmetric eight-crease base measured from an embedding.

    Returns the angle theta parametrizing the symmetric folding branches.
    Under this engine's orientation convention that is the polar angle of
    the valley-class crease directions about the symmetry axis; the mirror
    ambiguity of the axis is resolved by matching measured dihedrals against
    the closed-form branch values.
    """
    from .elastic import waterbomb_symmetric_oracle

    center = p.meta.get("center")
    mountains = p.meta.get("mountains")
    valleys = p.meta.get("valleys")
    if center is None or mountains is None:
        raise ValueError("pattern does not identify a waterbomb base apex")
    o = e.coords[center]

    def directions(ids):
        out = []
        for i in ids:
            c = p.creases[i]
            other = c.b if c.a == center else c.a
            d = e.coords[other] - o
            out.append(d / np.linalg.norm(d))
        return np.array(out)

    v_tips = directions(valleys)
    # symmetry axis: normal of the better-spread crease-direction ring (one
    # ring collapses to a point at the compactly folded states)
    axis, spread = None, -1.0
    for ring in (v_tips, directions(mountains)):
        sv = np.linalg.svd(ring - ring.mean(axis=0), compute_uv=False)
        if sv[1] > spread:
            spread = sv[1]
            _, _, vt = np.linalg.svd(ring - ring.mean(axis=0))
            axis = vt[-1]
    x = math.acos(float(np.clip(np.dot(axis, v_tips[0]), -1.0, 1.0)))
    measured = dihedral_angles(p, e)
    rho_m = float(np.mean(measured[mountains]))
    rho_v = float(np.mean(measured[valleys]))
    best, best_err = None, math.inf
    for theta in (x, math.pi - x):
        if theta < -1e-9 or theta > 3 * math.pi / 4 + 1e-9:
            continue
        theta = min(max(theta, 0.0), 3 * math.pi / 4)
        om, ov = waterbomb_symmetric_oracle(theta)
        err = abs(om - rho_m) + abs(ov - rho_v)
        if err < best_err:
            best, best_err = theta, err
    return best
