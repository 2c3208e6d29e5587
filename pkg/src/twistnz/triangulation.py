"""Ideal triangulations of one-cusped 3-manifolds as combinatorial objects.

A triangulation is a set of N ideal tetrahedra with labeled vertices 0..3 and
a complete face gluing table.  Face i of a tetrahedron is the face opposite
vertex i; a gluing entry (neighbor, perm) at (tet, face) sends vertex v of
tet to vertex perm[v] of neighbor, matching the glued faces.

Shape-parameter bookkeeping follows the standard quad convention: the edge
pairs {01, 23} carry z, {02, 13} carry z' = 1/(1-z), and {03, 12} carry
z'' = 1 - 1/z.

Everything downstream (gluing matrices, twisted matrices, covers, 2-3 moves)
is driven by the edge-class walks computed here: each edge class is the
cyclic sequence of tetrahedron wedges around it, together with the face
pairings crossed between consecutive wedges and the crossing signs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class TriangulationError(ValueError):
    pass


# --- small permutation helpers (S4 acting on vertex labels) ---------------

def perm_compose(p, q):
    """(p o q)[i] = p[q[i]]."""
    return tuple(p[q[i]] for i in range(4))


def perm_inverse(p):
    inv = [0] * 4
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def perm_parity(p):
    """0 for even, 1 for odd."""
    inv = 0
    for i in range(4):
        for j in range(i + 1, 4):
            inv += p[i] > p[j]
    return inv & 1


PAIR_ORDER = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# quad index: 0 <-> z, 1 <-> z', 2 <-> z''
QUAD_OF_PAIR = {
    (0, 1): 0, (2, 3): 0,
    (0, 2): 1, (1, 3): 1,
    (0, 3): 2, (1, 2): 2,
}

QUAD_NAMES = ("z", "zp", "zpp")


def opposite_pair(pair):
    v, w = pair
    rest = [u for u in range(4) if u not in (v, w)]
    return tuple(rest)


@dataclass(frozen=True)
class FacePairing:
    """An unordered gluing of two face slots, with a preferred direction.

    side_a is the lexicographically smaller (tet, face) slot; the dual edge
    is directed from side_a to side_b.  perm maps side_a's tetrahedron
    labels to side_b's.
    """

    index: int
    side_a: tuple
    side_b: tuple
    perm: tuple

    def directed_perm(self, from_slot):
        if from_slot == self.side_a:
            return self.perm
        if from_slot == self.side_b:
            return perm_inverse(self.perm)
        raise ValueError(f"slot {from_slot} not on face-pairing {self.index}")

    def other_slot(self, slot):
        return self.side_b if slot == self.side_a else self.side_a

    def sign_from(self, slot):
        """+1 when crossing side_a -> side_b, -1 the other way."""
        return 1 if slot == self.side_a else -1


@dataclass(frozen=True)
class Visit:
    """One wedge in an edge-class walk.

    The walk sits at the edge `pair` of tetrahedron `tet` (contributing to
    the quad `quad`), then crosses face-pairing `pairing` with the given
    crossing sign (+1 when exiting through the pairing's side_a).
    """

    tet: int
    pair: tuple
    quad: int
    pairing: int
    sign: int


@dataclass
class EdgeClass:
    index: int
    visits: list

    @property
    def valence(self):
        return len(self.visits)


@dataclass(frozen=True)
class PeripheralCurve:
    """Quad-weight vectors of a curve on the cusp torus."""

    name: str
    C: tuple
    Cp: tuple
    Cpp: tuple


class Triangulation:
    def __init__(self, gluings, peripheral_curves=(), meridian_dual_path=None,
                 cocycle=None):
        self.gluings = [[(int(nbr), tuple(int(x) for x in perm))
                         for nbr, perm in tet] for tet in gluings]
        self.n_tets = len(self.gluings)
        self.peripheral_curves = list(peripheral_curves)
        self.meridian_dual_path = list(meridian_dual_path) if meridian_dual_path else None
        self.cocycle = list(cocycle) if cocycle is not None else None
        self._validate_gluings()
        self.face_pairings = self._build_face_pairings()
        self.edge_classes = self._walk_edge_classes()
        self._validate_extras()

    # -- validation and construction ---------------------------------------

    def _validate_gluings(self):
        n = self.n_tets
        if n < 1:
            raise TriangulationError("need at least one tetrahedron")
        for t, tet in enumerate(self.gluings):
            if len(tet) != 4:
                raise TriangulationError(f"tet {t} must list 4 face gluings")
            for f, (nbr, perm) in enumerate(tet):
                if not (0 <= nbr < n):
                    raise TriangulationError(
                        f"tet {t} face {f}: neighbor {nbr} out of range")
                if sorted(perm) != [0, 1, 2, 3]:
                    raise TriangulationError(
                        f"tet {t} face {f}: {perm} is not a permutation of 0..3")
        for t in range(n):
            for f in range(4):
                nbr, perm = self.gluings[t][f]
                f2 = perm[f]
                nbr2, perm2 = self.gluings[nbr][f2]
                if nbr2 != t or perm_compose(perm2, perm) != (0, 1, 2, 3):
                    raise TriangulationError(
                        f"gluing at tet {t} face {f} is not involutive with "
                        f"tet {nbr} face {f2}")
                if nbr == t and f2 == f:
                    raise TriangulationError(
                        f"tet {t} face {f} is glued to itself")

    def _build_face_pairings(self):
        pairings = []
        slot_to_pairing = {}
        for t in range(self.n_tets):
            for f in range(4):
                nbr, perm = self.gluings[t][f]
                other = (nbr, perm[f])
                if (t, f) < other:
                    fp = FacePairing(len(pairings), (t, f), other, perm)
                    pairings.append(fp)
                    slot_to_pairing[(t, f)] = fp
                    slot_to_pairing[other] = fp
        if len(pairings) != 2 * self.n_tets:
            raise TriangulationError("face gluing table is not a complete pairing")
        self._slot_to_pairing = slot_to_pairing
        return pairings

    def pairing_at(self, tet, face):
        return self._slot_to_pairing[(tet, face)]

    def _walk_edge_classes(self):
        classes = []
        seen = {}
        for t0 in range(self.n_tets):
            for pair0 in PAIR_ORDER:
                if (t0, pair0) in seen:
                    continue
                visits = []
                faces = [u for u in range(4) if u not in pair0]
                state = (t0, pair0, min(faces))
                for _ in range(6 * self.n_tets + 1):
                    tet, pair, exit_face = state
                    if (tet, pair) in seen and (tet, pair) != (t0, pair0):
                        raise TriangulationError(
                            f"edge walk re-entered wedge {(tet, pair)}")
                    fp = self.pairing_at(tet, exit_face)
                    visits.append(Visit(tet, pair, QUAD_OF_PAIR[pair],
                                        fp.index, fp.sign_from((tet, exit_face))))
                    seen[(tet, pair)] = len(classes)
                    psi = fp.directed_perm((tet, exit_face))
                    nbr = fp.other_slot((tet, exit_face))[0]
                    new_pair = tuple(sorted((psi[pair[0]], psi[pair[1]])))
                    entered = psi[exit_face]
                    next_exit = next(u for u in range(4)
                                     if u not in new_pair and u != entered)
                    state = (nbr, new_pair, next_exit)
                    if state == (t0, pair0, min(faces)):
                        break
                else:
                    raise TriangulationError(
                        f"edge walk from tet {t0} pair {pair0} did not close")
                classes.append(EdgeClass(len(classes), visits))
        if len(classes) != self.n_tets:
            raise TriangulationError(
                f"{len(classes)} edge classes for {self.n_tets} tetrahedra; "
                "expected an equal number (one-cusped, no boundary)")
        self.wedge_class = seen
        return classes

    def _validate_extras(self):
        for curve in self.peripheral_curves:
            for vec in (curve.C, curve.Cp, curve.Cpp):
                if len(vec) != self.n_tets:
                    raise TriangulationError(
                        f"curve {curve.name}: weight vectors must have length "
                        f"{self.n_tets}")
        if self.cocycle is not None and len(self.cocycle) != 2 * self.n_tets:
            raise TriangulationError(
                f"cocycle must have one value per face-pairing "
                f"({2 * self.n_tets}), got {len(self.cocycle)}")
        if self.meridian_dual_path is not None:
            path = self.meridian_dual_path
            if not path:
                raise TriangulationError("meridian dual path must be nonempty")
            tets = []
            for step in path:
                if not isinstance(step, int) or step == 0 or abs(step) > len(self.face_pairings):
                    raise TriangulationError(
                        f"meridian dual path entry {step} is not a signed "
                        f"1-based face-pairing index")
                fp = self.face_pairings[abs(step) - 1]
                src, dst = (fp.side_a, fp.side_b) if step > 0 else (fp.side_b, fp.side_a)
                tets.append((src[0], dst[0]))
            for (_, prev_end), (nxt_start, _2) in zip(tets, tets[1:] + tets[:1]):
                if prev_end != nxt_start:
                    raise TriangulationError("meridian dual path is not a closed cycle")

    # -- matrices -----------------------------------------------------------

    def gluing_matrices(self):
        """Edge-class x tetrahedron quad incidence counts (G, G', G'')."""
        n = self.n_tets
        mats = [[[0] * n for _ in range(n)] for _ in range(3)]
        for ec in self.edge_classes:
            for v in ec.visits:
                mats[v.quad][ec.index][v.tet] += 1
        return tuple(mats)

    def nz_matrices(self):
        """A = G - G', B = G'' - G'."""
        G, Gp, Gpp = self.gluing_matrices()
        n = self.n_tets
        A = [[G[i][j] - Gp[i][j] for j in range(n)] for i in range(n)]
        B = [[Gpp[i][j] - Gp[i][j] for j in range(n)] for i in range(n)]
        return A, B

    def curve_by_name(self, name):
        for curve in self.peripheral_curves:
            if curve.name == name:
                return curve
        raise KeyError(f"no peripheral curve named {name!r}")

    def is_oriented(self):
        return all(perm_parity(perm) == 1
                   for tet in self.gluings for _, perm in tet)

    # -- serialization -------------------------------------------------------

    def to_dict(self):
        d = {
            "num_tetrahedra": self.n_tets,
            "gluings": [[[nbr, list(perm)] for nbr, perm in tet]
                        for tet in self.gluings],
            "peripheral_curves": [
                {"name": c.name, "C": list(c.C), "Cp": list(c.Cp),
                 "Cpp": list(c.Cpp)}
                for c in self.peripheral_curves
            ],
        }
        if self.meridian_dual_path is not None:
            d["meridian_dual_path"] = list(self.meridian_dual_path)
        if self.cocycle is not None:
            d["cocycle"] = list(self.cocycle)
        return d


def parse_triangulation(source):
    """Build a Triangulation from a JSON string or an already-decoded dict."""
    if isinstance(source, (str, bytes)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise TriangulationError(f"invalid JSON: {e}") from None
    else:
        data = source
    if not isinstance(data, dict):
        raise TriangulationError("top-level JSON value must be an object")
    try:
        n = int(data["num_tetrahedra"])
        gluings = data["gluings"]
    except (KeyError, TypeError, ValueError) as e:
        raise TriangulationError(f"missing or malformed field: {e}") from None
    if len(gluings) != n:
        raise TriangulationError(
            f"num_tetrahedra is {n} but {len(gluings)} gluing rows given")
    curves = []
    for c in data.get("peripheral_curves", []):
        try:
            curves.append(PeripheralCurve(str(c["name"]), tuple(c["C"]),
                                          tuple(c["Cp"]), tuple(c["Cpp"])))
        except (KeyError, TypeError) as e:
            raise TriangulationError(f"malformed peripheral curve: {e}") from None
    return Triangulation(
        gluings,
        peripheral_curves=curves,
        meridian_dual_path=data.get("meridian_dual_path"),
        cocycle=data.get("cocycle"),
    )


def serialize_triangulation(T):
    return json.dumps(T.to_dict(), sort_keys=True, indent=1)


def relabel(T, tet_perm, vertex_perms):
    """Relabeled copy: tet t becomes tet_perm[t], with vertex_perms[t] applied.

    Peripheral curve weights follow the tets; quad weights are permuted
    according to how the vertex relabeling moves the quads.  Cocycle values
    and the meridian dual path are dropped (face-pairing indices do not
    survive relabeling).
    """
    n = T.n_tets
    new_gluings = [None] * n
    for t in range(n):
        rho_t = vertex_perms[t]
        row = [None] * 4
        for f in range(4):
            nbr, perm = T.gluings[t][f]
            rho_n = vertex_perms[nbr]
            new_perm = perm_compose(perm_compose(rho_n, perm), perm_inverse(rho_t))
            row[rho_t[f]] = [tet_perm[nbr], list(new_perm)]
        new_gluings[tet_perm[t]] = row

    new_curves = []
    for c in T.peripheral_curves:
        trip = [[0] * n, [0] * n, [0] * n]
        old = (c.C, c.Cp, c.Cpp)
        for t in range(n):
            rho = vertex_perms[t]
            for q, pair in ((0, (0, 1)), (1, (0, 2)), (2, (0, 3))):
                newq = QUAD_OF_PAIR[tuple(sorted((rho[pair[0]], rho[pair[1]])))]
                trip[newq][tet_perm[t]] = old[q][t]
        new_curves.append(PeripheralCurve(c.name, tuple(trip[0]),
                                          tuple(trip[1]), tuple(trip[2])))
    return Triangulation(new_gluings, peripheral_curves=new_curves)


# --- shape parameter cycle -------------------------------------------------

def shape_param(z, quad):
    """z, z' = 1/(1-z), or z'' = 1 - 1/z according to quad in {0,1,2}."""
    if quad == 0:
        return z
    if quad == 1:
        return 1.0 / (1.0 - z)
    return 1.0 - 1.0 / z


# --- 2-3 move ---------------------------------------------------------------

@dataclass
class PachnerMove:
    """Result of a 2-3 move, with enough bookkeeping to compare invariants.

    The new triangulation puts the three fresh tetrahedra first (indices
    0, 1, 2), followed by the untouched old tetrahedra in their old order.
    The edge classes of the new triangulation contain every old edge class
    plus one new edge (the core of the bipyramid).
    """

    triangulation: Triangulation
    shapes: list | None
    flattening: object | None
    old_tet_of_new: dict       # new index -> old index, for surviving tets
    new_tet_of_old: dict       # old index -> new index
    alpha_index: int           # deleted tet that was side_a of the shared face
    beta_index: int
    beta_level: int            # cocycle value across the shared face, a -> b
    beta_quads: tuple          # beta's quad labels in the roles (z, z', z'')
    wedge_map: dict            # old wedge (tet, pair) -> (new wedge, offset)
    new_edge_start: tuple      # wedge of the new core edge


def _require(cond, msg):
    if not cond:
        raise TriangulationError(msg)


def pachner_23(T, shared_face, z=None, f=None):
    """2-3 move along the face-pairing with index `shared_face`.

    The two tetrahedra on either side of the face are replaced by three
    around a new edge.  Shape parameters and flattenings, when given, are
    transported: the fresh z' parameters are products of the two old
    parameters at the matching lateral edges, and the fresh flattening is a
    particular integer solution of the transported wedge sums.  A cocycle
    stored on T is transported as well.

    Degenerate geometry (the product of the two old shapes at the new core
    edge equal to 0 or 1) is rejected.
    """
    fp = T.face_pairings[shared_face]
    alpha, fa = fp.side_a
    beta, fb = fp.side_b
    _require(alpha != beta, "2-3 move needs distinct tetrahedra on the face")
    _require(T.is_oriented(), "2-3 move requires an oriented triangulation")
    pi = fp.perm
    n = T.n_tets

    # Equator vertices of alpha, keyed by the quad of the lateral edge
    # (fa, u): e[0] lies on the z-edge from the apex, e[1] on z', e[2] on z''.
    e = [None, None, None]
    for u in range(4):
        if u != fa:
            e[QUAD_OF_PAIR[tuple(sorted((fa, u)))]] = u
    y = [pi[v] for v in e]
    # beta's quads at its apex follow the reversed cycle j, j+2, j+1 when the
    # triangulation is consistently oriented.
    j1 = QUAD_OF_PAIR[tuple(sorted((fb, y[0])))]
    for idx, yk in enumerate(y):
        _require(QUAD_OF_PAIR[tuple(sorted((fb, yk)))] == (j1 + 2 * idx) % 3,
                 "orientation conventions violated at the shared face")

    # New tets: a=0 around equator edge {x2,x3}, b=1 around {x3,x1},
    # c=2 around {x1,x2}; each labeled (Q, x_next, P, x_prev).
    # Vertex-label transitions from new tets into the old ones:
    #   n_top[k]: labels of new tet k -> labels of alpha (across face 0),
    #   n_bot[k]: labels of new tet k -> labels of beta (across face 2).
    n_top = [
        (e[0], e[1], fa, e[2]),
        (e[1], e[2], fa, e[0]),
        (e[2], e[0], fa, e[1]),
    ]
    n_bot = [
        tuple(pi[v] for v in (fa, e[1], e[0], e[2])),
        tuple(pi[v] for v in (fa, e[2], e[1], e[0])),
        tuple(pi[v] for v in (fa, e[0], e[2], e[1])),
    ]

    old_tet_of_new = {}
    new_tet_of_old = {}
    for t in range(n):
        if t not in (alpha, beta):
            idx = 3 + len(old_tet_of_new)
            old_tet_of_new[idx] = t
            new_tet_of_old[t] = idx

    # External slots of the bipyramid and their new owners:
    # (alpha, e[k]) -> (new tet k, face 0), (beta, y[k]) -> (new tet k, face 2).
    slot_owner = {}
    for k in range(3):
        slot_owner[(alpha, e[k])] = (k, 0, n_top[k])
        slot_owner[(beta, y[k])] = (k, 2, n_bot[k])

    def reroute(old_slot, trans):
        """New (neighbor, perm) for a face whose old gluing left `old_slot`
        with label transition `trans` (new labels -> old labels at old_slot's
        tet)."""
        t_old, f_old = old_slot
        nbr, psi = T.gluings[t_old][f_old]
        target = (nbr, psi[f_old])
        if target in slot_owner:
            k2, f2, trans2 = slot_owner[target]
            return k2, perm_compose(perm_inverse(trans2), perm_compose(psi, trans))
        return new_tet_of_old[nbr], perm_compose(psi, trans)

    new_n = n + 1
    new_gluings = [[None] * 4 for _ in range(new_n)]
    internal = {
        # (tet, face) -> (tet', face'), with the fixed transition (0 3 2 1)
        (0, 1): (1, 3), (1, 3): (0, 1),
        (0, 3): (2, 1), (2, 1): (0, 3),
        (1, 1): (2, 3), (2, 3): (1, 1),
    }
    swap13 = (0, 3, 2, 1)
    for (t1, f1), (t2, f2) in internal.items():
        new_gluings[t1][f1] = [t2, list(swap13)]
    for k in range(3):
        nbr, perm = reroute((alpha, e[k]), n_top[k])
        new_gluings[k][0] = [nbr, list(perm)]
        nbr, perm = reroute((beta, y[k]), n_bot[k])
        new_gluings[k][2] = [nbr, list(perm)]
    for t in range(n):
        if t in (alpha, beta):
            continue
        t_new = new_tet_of_old[t]
        for fc in range(4):
            nbr, psi = T.gluings[t][fc]
            target = (nbr, psi[fc])
            if target in slot_owner:
                k2, f2, trans2 = slot_owner[target]
                new_gluings[t_new][fc] = [k2, list(perm_compose(perm_inverse(trans2), psi))]
            else:
                new_gluings[t_new][fc] = [new_tet_of_old[nbr], list(psi)]

    # Cocycle transport: the three new tets live at alpha's level 0; beta sat
    # at level d across the shared face.  The value on a new pairing is the
    # level jump it effects between the (re)based lifts of its two sides.
    d_level = 0
    if T.cocycle is not None:
        d_level = T.cocycle[shared_face] * fp.sign_from((alpha, fa))
    T_new = Triangulation(new_gluings)
    if T.cocycle is not None:

        def departing_value(k, fnew):
            # level reached by crossing out of new tet k through face 0 or 2,
            # measured from the bipyramid's base level
            old_slot = (alpha, e[k]) if fnew == 0 else (beta, y[k])
            base = 0 if fnew == 0 else d_level
            old_fp = T.pairing_at(*old_slot)
            return base + T.cocycle[old_fp.index] * old_fp.sign_from(old_slot)

        vals = [0] * len(T_new.face_pairings)
        for p in T_new.face_pairings:
            (t1, f1), (t2, f2) = p.side_a, p.side_b
            a_fresh = t1 < 3 and f1 in (0, 2)
            b_fresh = t2 < 3 and f2 in (0, 2)
            if t1 < 3 and f1 in (1, 3):
                vals[p.index] = 0  # faces around the new core edge
            elif a_fresh and b_fresh:
                # both sides are rerouted bipyramid boundary faces
                arrival = d_level if f2 == 2 else 0
                vals[p.index] = departing_value(t1, f1) - arrival
            elif a_fresh:
                vals[p.index] = departing_value(t1, f1)
            elif b_fresh:
                vals[p.index] = -departing_value(t2, f2)
            else:
                old_fp = T.pairing_at(old_tet_of_new[t1], f1)
                vals[p.index] = T.cocycle[old_fp.index] * old_fp.sign_from(
                    (old_tet_of_new[t1], f1))
        T_new = Triangulation(new_gluings, cocycle=vals)

    # Wedge transport: every wedge of a surviving tet persists; the wedges of
    # alpha and beta on lateral and equatorial edges map to designated new
    # wedges, carried at alpha's level (offset 0) or beta's (offset d).
    wedge_map = {}
    for t in range(n):
        if t in (alpha, beta):
            continue
        for pair in PAIR_ORDER:
            wedge_map[(t, pair)] = ((new_tet_of_old[t], pair), 0)
    # lateral edges {P, x_k}: alpha wedge (fa, e[k]); {Q, x_k}: beta (fb, y[k]).
    # A walk restarted at the image of a beta wedge must anchor the new tets
    # at level -d (beta itself was the level-0 anchor).
    lateral_top = {0: (1, (2, 3)), 1: (2, (2, 3)), 2: (0, (2, 3))}
    lateral_bot = {0: (1, (0, 3)), 1: (2, (0, 3)), 2: (0, (0, 3))}
    for k in range(3):
        wedge_map[(alpha, tuple(sorted((fa, e[k]))))] = (lateral_top[k], 0)
        wedge_map[(beta, tuple(sorted((fb, y[k]))))] = (lateral_bot[k], -d_level)
    # equatorial edges {x_i, x_j}: both old wedges map to the z'-wedge (1,3)
    # of the corresponding new tet.
    for k, (i, j) in ((0, (1, 2)), (1, (2, 0)), (2, (0, 1))):
        wedge_map[(alpha, tuple(sorted((e[i], e[j]))))] = ((k, (1, 3)), 0)
        wedge_map[(beta, tuple(sorted((y[i], y[j]))))] = ((k, (1, 3)), -d_level)

    new_shapes = None
    if z is not None:
        s_alpha = [shape_param(z[alpha], q) for q in range(3)]
        s_beta = [shape_param(z[beta], (j1 + 2 * q) % 3) for q in range(3)]
        new_shapes = []
        for k in range(3):
            zp_new = s_alpha[k] * s_beta[k]
            _require(abs(zp_new) > 1e-12 and abs(zp_new - 1.0) > 1e-12,
                     "2-3 move is degenerate for these shapes")
            new_shapes.append(1.0 - 1.0 / zp_new)
        new_shapes += [z[t] for t in range(n) if t not in (alpha, beta)]

    new_flat = None
    if f is not None:
        from .homology import Flattening
        Fa, Fpa, Fppa = f.f[alpha], f.fp[alpha], f.fpp[alpha]
        bt = (f.f[beta], f.fp[beta], f.fpp[beta])
        Fb, Fpb, Fppb = bt[j1 % 3], bt[(j1 + 1) % 3], bt[(j1 + 2) % 3]
        f_a, fpp_a = Fppa, Fpb - Fa - Fppa + Fppb
        f_b, fpp_b = Fa + Fppa - Fppb, 0
        f_c, fpp_c = Fpa - Fpb + Fa + Fppa - Fppb, Fppb - Fppa
        fp_a, fp_b, fp_c = Fa + Fb, Fpa + Fppb, Fppa + Fpb
        rest = [t for t in range(n) if t not in (alpha, beta)]
        new_flat = Flattening(
            [f_a, f_b, f_c] + [f.f[t] for t in rest],
            [fp_a, fp_b, fp_c] + [f.fp[t] for t in rest],
            [fpp_a, fpp_b, fpp_c] + [f.fpp[t] for t in rest],
        )

    # Locate the new core edge: the z'-wedge (0, (0, 2)) of tet a.
    return PachnerMove(
        triangulation=T_new,
        shapes=new_shapes,
        flattening=new_flat,
        old_tet_of_new=old_tet_of_new,
        new_tet_of_old=new_tet_of_old,
        alpha_index=alpha,
        beta_index=beta,
        beta_level=d_level,
        beta_quads=(j1, (j1 + 1) % 3, (j1 + 2) % 3),
        wedge_map=wedge_map,
        new_edge_start=(0, (0, 2)),
    )


# --- cyclic covers -----------------------------------------------------------

def cyclic_cover(T, phi, n):
    """The n-fold cyclic cover determined by the cocycle phi.

    Sheets are indexed 0..n-1; the copy of base tetrahedron j on sheet k gets
    index k*N + j.  A face of (j, k) glued in the base across pairing p with
    directed cocycle value d leads to (j', (k + d) mod n) with the same
    vertex permutation.  The returned triangulation carries the cover's own
    cocycle (the winding carry), so its twisted matrices are immediately
    available.
    """
    if n < 1:
        raise ValueError("cover degree must be positive")
    vals = list(phi.values if hasattr(phi, "values") else phi)
    N = T.n_tets
    new_gluings = [[None] * 4 for _ in range(n * N)]
    for k in range(n):
        for j in range(N):
            for fc in range(4):
                nbr, psi = T.gluings[j][fc]
                fpg = T.pairing_at(j, fc)
                d = vals[fpg.index] * fpg.sign_from((j, fc))
                new_gluings[k * N + j][fc] = [((k + d) % n) * N + nbr, list(psi)]
    Tn = Triangulation(new_gluings)
    cover_vals = [0] * len(Tn.face_pairings)
    for p in Tn.face_pairings:
        (t1, f1) = p.side_a
        k, j = divmod(t1, N)
        fpg = T.pairing_at(j, f1)
        d = vals[fpg.index] * fpg.sign_from((j, f1))
        # carry of the sheet arithmetic: level k + d lands on sheet
        # (k + d) mod n after winding (k + d - (k + d) mod n)/n times around
        cover_vals[p.index] = (k + d - ((k + d) % n)) // n
    return Triangulation(new_gluings, cocycle=cover_vals)
