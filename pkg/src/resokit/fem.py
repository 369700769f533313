"""In-house FEM modal solver.

Beam eigenmodes use 2-node Euler-Bernoulli elements (cubic Hermite shape
functions, consistent mass). Disk in-plane eigenmodes use linear-triangle
plane-stress elements on a structured polar mesh. Generalized symmetric
eigenproblems are solved densely (scipy.linalg.eigh); problem sizes here
stay well below 10^4 dofs, so no sparse machinery is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .core import BeamGeometry, DiskGeometry, Material, ModeResult, VibrationAxis
from .errors import (AmbiguousAngularOrderError, EigenSolveError, InvariantError,
                     MeshError, RigidBodyModeError)

_SYM_RTOL = 1e-12          # symmetry tolerance for assembled matrices
_RESIDUAL_BOUND = 1e-8     # relative eigen-residual bound per returned mode
_RIGID_RATIO = 1e-6        # rigid eigenvalue threshold vs first elastic


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Mesh:
    """Nodes + connectivity. kind is 'beam_1d' or 'plane_stress_2d'.

    beam_1d: nodes (N, 1) x-coordinates, elements (E, 2) segments.
    plane_stress_2d: nodes (N, 2), elements (E, 3) CCW triangles.
    """

    nodes: np.ndarray
    elements: np.ndarray
    kind: str

    def __post_init__(self):
        nodes = _readonly(np.asarray(self.nodes, dtype=float))
        elements = _readonly(np.asarray(self.elements, dtype=int))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        if self.kind not in ("beam_1d", "plane_stress_2d"):
            raise MeshError(f"unknown mesh kind {self.kind!r}")
        if elements.size and (elements.min() < 0 or elements.max() >= len(nodes)):
            raise MeshError("element connectivity index out of range")
        if self.kind == "beam_1d":
            if elements.shape[1] != 2:
                raise MeshError("beam_1d elements must have 2 nodes")
            lengths = np.abs(nodes[elements[:, 1], 0] - nodes[elements[:, 0], 0])
            if np.any(lengths <= 0):
                raise MeshError("degenerate beam element (zero length)")
        else:
            if elements.shape[1] != 3:
                raise MeshError("plane_stress_2d elements must have 3 nodes")
            if np.any(self.triangle_areas() <= 0):
                raise MeshError("degenerate or negatively oriented triangle")

    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.elements]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))


@dataclass(frozen=True)
class AssembledSystem:
    """Assembled K, M with dof bookkeeping.

    dof_map[i] = (node index, component), component in {'w','theta','ux','uy'}.
    constraints is the sorted tuple of fixed dof indices. mesh is kept for
    mode identification and export.
    """

    stiffness: np.ndarray
    mass: np.ndarray
    dof_map: tuple
    constraints: tuple
    mesh: Mesh | None = field(default=None, compare=False)

    def __post_init__(self):
        k = _readonly(np.asarray(self.stiffness, dtype=float))
        m = _readonly(np.asarray(self.mass, dtype=float))
        object.__setattr__(self, "stiffness", k)
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "dof_map", tuple(self.dof_map))
        object.__setattr__(self, "constraints", tuple(sorted(self.constraints)))
        n = k.shape[0]
        if k.shape != (n, n) or m.shape != (n, n) or len(self.dof_map) != n:
            raise InvariantError("stiffness/mass/dof_map sizes inconsistent")
        for name, a in (("stiffness", k), ("mass", m)):
            scale = np.max(np.abs(a))
            if np.max(np.abs(a - a.T)) > _SYM_RTOL * scale:
                raise InvariantError(f"{name} matrix not symmetric")
        free = self.free_dofs()
        try:
            np.linalg.cholesky(m[np.ix_(free, free)])
        except np.linalg.LinAlgError:
            raise InvariantError("mass matrix not positive-definite on free dofs") from None

    def free_dofs(self) -> np.ndarray:
        fixed = set(self.constraints)
        return np.array([i for i in range(len(self.dof_map)) if i not in fixed], dtype=int)


# ---------------------------------------------------------------------------
# beam assembly

def _beam_section(geom: BeamGeometry):
    """(area, bending inertia) about the axis selected by vibration_axis."""
    w, t = geom.width, geom.thickness
    if geom.vibration_axis is VibrationAxis.IN_PLANE:
        inertia = t * w**3 / 12.0    # deflection along width
    else:
        inertia = w * t**3 / 12.0    # deflection along thickness
    return w * t, inertia


def assemble_beam(geom: BeamGeometry, mat: Material, n_elements: int,
                  clamped: bool = True) -> AssembledSystem:
    """Euler-Bernoulli beam with consistent mass; both ends clamped by default."""
    if n_elements < 2:
        raise InvariantError(f"n_elements must be >= 2, got {n_elements}")
    area, inertia = _beam_section(geom)
    le = geom.length / n_elements
    ei, ral = mat.youngs_modulus * inertia, mat.density * area * le

    ke = (ei / le**3) * np.array([
        [12, 6 * le, -12, 6 * le],
        [6 * le, 4 * le**2, -6 * le, 2 * le**2],
        [-12, -6 * le, 12, -6 * le],
        [6 * le, 2 * le**2, -6 * le, 4 * le**2]])
    me = (ral / 420.0) * np.array([
        [156, 22 * le, 54, -13 * le],
        [22 * le, 4 * le**2, 13 * le, -3 * le**2],
        [54, 13 * le, 156, -22 * le],
        [-13 * le, -3 * le**2, -22 * le, 4 * le**2]])

    n_nodes = n_elements + 1
    ndof = 2 * n_nodes
    k = np.zeros((ndof, ndof))
    m = np.zeros((ndof, ndof))
    for e in range(n_elements):
        i = 2 * e
        k[i:i + 4, i:i + 4] += ke
        m[i:i + 4, i:i + 4] += me

    dof_map = tuple((node, comp) for node in range(n_nodes) for comp in ("w", "theta"))
    constraints = (0, 1, ndof - 2, ndof - 1) if clamped else ()
    mesh = Mesh(nodes=np.linspace(0.0, geom.length, n_nodes)[:, None],
                elements=np.column_stack([np.arange(n_elements),
                                          np.arange(1, n_elements + 1)]),
                kind="beam_1d")
    return AssembledSystem(k, m, dof_map, constraints, mesh)


# ---------------------------------------------------------------------------
# disk mesh + plane-stress assembly

def mesh_disk(geom: DiskGeometry, target_edge: float) -> Mesh:
    """Structured polar mesh: ring i at radius R*i/m carries 6*i nodes.

    Near-equilateral triangles, deterministic construction, boundary nodes
    exactly on the circle. m is chosen so the radial step matches
    target_edge.
    """
    r_out = geom.radius
    if not 0 < target_edge < r_out / 4:
        raise MeshError(f"target_edge must be in (0, radius/4), got {target_edge}")
    m = max(4, round(r_out / target_edge))
    nodes = [(0.0, 0.0)]
    rings = [[0]]
    for i in range(1, m + 1):
        r = r_out * i / m
        cnt = 6 * i
        ring = []
        for j in range(cnt):
            th = 2 * math.pi * j / cnt
            ring.append(len(nodes))
            nodes.append((r * math.cos(th), r * math.sin(th)))
        rings.append(ring)

    tris = []
    for i in range(m):
        inner, outer = rings[i], rings[i + 1]
        ni, no = len(inner), len(outer)
        if ni == 1:
            c = inner[0]
            for j in range(no):
                tris.append((c, outer[j], outer[(j + 1) % no]))
            continue
        # advance whichever ring pointer trails in angle (two-pointer strip)
        a = b = 0
        while a < ni or b < no:
            take_inner = (b >= no) or (a < ni and (a + 1) * no <= (b + 1) * ni)
            if take_inner:
                tris.append((inner[a % ni], outer[b % no], inner[(a + 1) % ni]))
                a += 1
            else:
                tris.append((inner[a % ni], outer[b % no], outer[(b + 1) % no]))
                b += 1
    return Mesh(nodes=np.array(nodes), elements=np.array(tris, dtype=int),
                kind="plane_stress_2d")


def assemble_disk(geom: DiskGeometry, mat: Material, mesh: Mesh) -> AssembledSystem:
    """Plane-stress CST stiffness + consistent mass, free boundary."""
    if mesh.kind != "plane_stress_2d":
        raise MeshError("disk assembly needs a plane_stress_2d mesh")
    e_mod, nu, rho, t = (mat.youngs_modulus, mat.poisson_ratio,
                         mat.density, geom.thickness)
    d_mat = e_mod / (1 - nu**2) * np.array([
        [1, nu, 0], [nu, 1, 0], [0, 0, (1 - nu) / 2]])
    me_template = np.array([
        [2, 0, 1, 0, 1, 0], [0, 2, 0, 1, 0, 1], [1, 0, 2, 0, 1, 0],
        [0, 1, 0, 2, 0, 1], [1, 0, 1, 0, 2, 0], [0, 1, 0, 1, 0, 2]]) / 12.0

    n = len(mesh.nodes)
    k = np.zeros((2 * n, 2 * n))
    m = np.zeros((2 * n, 2 * n))
    for (i, j, l) in mesh.elements:
        (xi, yi), (xj, yj), (xl, yl) = mesh.nodes[i], mesh.nodes[j], mesh.nodes[l]
        det = (xj - xi) * (yl - yi) - (xl - xi) * (yj - yi)
        area = 0.5 * det
        bi, bj, bl = yj - yl, yl - yi, yi - yj
        ci, cj, cl = xl - xj, xi - xl, xj - xi
        b_mat = (1.0 / det) * np.array([
            [bi, 0, bj, 0, bl, 0],
            [0, ci, 0, cj, 0, cl],
            [ci, bi, cj, bj, cl, bl]])
        ke = t * area * (b_mat.T @ d_mat @ b_mat)
        me = rho * t * area * me_template
        dofs = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1, 2 * l, 2 * l + 1]
        k[np.ix_(dofs, dofs)] += ke
        m[np.ix_(dofs, dofs)] += me

    dof_map = tuple((node, comp) for node in range(n) for comp in ("ux", "uy"))
    return AssembledSystem(k, m, dof_map, (), mesh)


# ---------------------------------------------------------------------------
# eigensolver

def _translational_amplitude(sys: AssembledSystem, vec: np.ndarray) -> np.ndarray:
    """Per-node displacement magnitude from translational dof components."""
    comp = {}
    for i, (node, c) in enumerate(sys.dof_map):
        if c in ("w", "ux", "uy"):
            comp.setdefault(node, []).append(vec[i])
    return np.array([math.hypot(*vals) if len(vals) > 1 else abs(vals[0])
                     for _, vals in sorted(comp.items())])


def solve_modes(sys: AssembledSystem, k: int):
    """k lowest modes of K*phi = lambda*M*phi on the constrained system.

    Returns [(frequency_hz, mode_vector)] sorted ascending. Mode vectors are
    full length (zeros at constrained dofs) and normalized to unit maximum
    translational displacement. Deterministic for fixed input.
    """
    free = sys.free_dofs()
    if not 1 <= k <= len(free):
        raise EigenSolveError(f"k must be in [1, {len(free)}], got {k}")
    kk = sys.stiffness[np.ix_(free, free)]
    mm = sys.mass[np.ix_(free, free)]
    try:
        vals, vecs = eigh(kk, mm, subset_by_index=(0, k - 1))
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError(f"generalized eigensolver failed: {exc}") from None

    k_scale = float(np.max(np.abs(kk)))
    out = []
    for idx in range(k):
        lam = float(vals[idx])
        v = vecs[:, idx]
        kv = kk @ v
        # residual bound is meaningful only away from the rigid-body null space
        norm_kv = float(np.linalg.norm(kv))
        if norm_kv > 1e-9 * k_scale * float(np.linalg.norm(v)):
            resid = float(np.linalg.norm(kv - lam * (mm @ v))) / norm_kv
            if resid > _RESIDUAL_BOUND:
                raise EigenSolveError(
                    f"eigen-residual {resid:.2e} exceeds {_RESIDUAL_BOUND:.0e} "
                    f"for mode {idx}")
        full = np.zeros(len(sys.dof_map))
        full[free] = v
        amp = _translational_amplitude(sys, full)
        peak = float(np.max(amp))
        if peak > 0:
            full = full / peak
        # sign convention: largest-magnitude translational dof positive
        tdofs = [i for i, (_, c) in enumerate(sys.dof_map) if c in ("w", "ux", "uy")]
        lead = max(tdofs, key=lambda i: abs(full[i]))
        if full[lead] < 0:
            full = -full
        freq = math.sqrt(max(lam, 0.0)) / (2 * math.pi)
        out.append((freq, full))
    return out


def identify_angular_order(mode_vector: np.ndarray, mesh: Mesh,
                           ambiguity_ratio: float = 0.1) -> int:
    """Dominant harmonic of the boundary radial displacement.

    Projects u_r(theta) on the outer ring onto cos/sin harmonics and returns
    the index with the largest energy. Raises AmbiguousAngularOrderError
    when the two largest harmonic energies are within ambiguity_ratio of
    each other.
    """
    if mesh.kind != "plane_stress_2d":
        raise MeshError("angular order identification needs a disk mesh")
    r = np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])
    r_out = float(r.max())
    bnd = np.where(r >= r_out * (1 - 1e-9))[0]
    theta = np.arctan2(mesh.nodes[bnd, 1], mesh.nodes[bnd, 0])
    order = np.argsort(theta)
    bnd, theta = bnd[order], theta[order]
    ux, uy = mode_vector[2 * bnd], mode_vector[2 * bnd + 1]
    u_rad = (ux * mesh.nodes[bnd, 0] + uy * mesh.nodes[bnd, 1]) / r[bnd]

    nb = len(bnd)
    n_max = max(1, (nb - 1) // 2)
    energies = []
    for n in range(0, n_max + 1):
        scale = 1.0 / nb if n == 0 else 2.0 / nb  # DC component has no pair
        a = np.sum(u_rad * np.cos(n * theta)) * scale
        b = np.sum(u_rad * np.sin(n * theta)) * scale
        energies.append(a * a + b * b)
    energies = np.array(energies)
    top = int(np.argmax(energies))
    rest = energies.copy()
    rest[top] = -1.0
    second = int(np.argmax(rest))
    e1, e2 = energies[top], energies[second]
    if e1 <= 0:
        raise AmbiguousAngularOrderError("boundary radial displacement is zero",
                                         (top, second))
    if (e1 - e2) / e1 < ambiguity_ratio:
        raise AmbiguousAngularOrderError(
            f"harmonics {top} and {second} within {ambiguity_ratio:.0%} energy",
            (top, second))
    return top


def disk_modal_fem(geom: DiskGeometry, mat: Material, mesh: Mesh,
                   n_modes: int = 6):
    """Free-boundary elastic disk modes as ModeResults.

    Discards the 3 rigid-body modes, labels each elastic mode with its
    boundary angular order, and reduces it to effective parameters at the
    rim radial antinode (m_eff = phi^T M phi with max |u_r| on the boundary
    scaled to 1).
    """
    sys = assemble_disk(geom, mat, mesh)
    modes = solve_modes(sys, n_modes + 3)
    lam = np.array([(2 * math.pi * f)**2 for f, _ in modes])
    if len(lam) < 4:
        raise RigidBodyModeError("need at least 4 modes to separate rigid body motion")
    first_elastic = lam[3]
    n_rigid = int(np.sum(lam[:4] < _RIGID_RATIO * first_elastic))
    if n_rigid != 3:
        raise RigidBodyModeError(
            f"expected 3 rigid-body modes for a free disk, found {n_rigid}")

    r = np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])
    r_out = float(r.max())
    bnd = np.where(r >= r_out * (1 - 1e-9))[0]
    mass = sys.mass

    results = []
    for freq, vec in modes[3:]:
        try:
            order = identify_angular_order(vec, mesh)
        except AmbiguousAngularOrderError:
            order = 0
        ux, uy = vec[2 * bnd], vec[2 * bnd + 1]
        u_rad = (ux * mesh.nodes[bnd, 0] + uy * mesh.nodes[bnd, 1]) / r[bnd]
        rim = float(np.max(np.abs(u_rad)))
        if rim <= 0:
            continue
        scaled = vec / rim
        m_eff = float(scaled @ mass @ scaled)
        w0 = 2 * math.pi * freq
        amp = _translational_amplitude(sys, vec)
        shape = amp / np.max(amp)
        results.append(ModeResult(frequency=freq, mode_order=order,
                                  effective_mass=m_eff,
                                  effective_stiffness=w0 * w0 * m_eff,
                                  mode_shape=tuple(shape)))
    return results


# ---------------------------------------------------------------------------
# export

def export_mesh(mesh: Mesh, path):
    """Plain-text mesh: 'node i x [y]' and 'elem i n0 n1 [n2]' lines."""
    with open(path, "w") as f:
        f.write(f"# mesh kind={mesh.kind} nodes={len(mesh.nodes)} "
                f"elements={len(mesh.elements)}\n")
        for i, xy in enumerate(mesh.nodes):
            f.write("node " + str(i) + " " + " ".join(repr(float(v)) for v in xy) + "\n")
        for i, conn in enumerate(mesh.elements):
            f.write("elem " + str(i) + " " + " ".join(str(int(v)) for v in conn) + "\n")


def export_modes_csv(sys: AssembledSystem, modes, path):
    """CSV of nodal displacement components for each (freq, vector) pair."""
    mesh = sys.mesh
    comps = sorted({c for _, c in sys.dof_map})
    with open(path, "w") as f:
        header = ["node"] + [f"coord{ax}" for ax in range(mesh.nodes.shape[1])]
        for k, (freq, _) in enumerate(modes):
            header += [f"mode{k}_f{freq:.6g}_{c}" for c in comps]
        f.write(",".join(header) + "\n")
        dof_of = {}
        for i, (node, c) in enumerate(sys.dof_map):
            dof_of[(node, c)] = i
        for node in range(len(mesh.nodes)):
            row = [str(node)] + [repr(float(v)) for v in mesh.nodes[node]]
            for _, vec in modes:
                for c in comps:
                    i = dof_of.get((node, c))
                    row.append(repr(float(vec[i])) if i is not None else "")
            f.write(",".join(row) + "\n")
