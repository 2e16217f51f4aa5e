"""The crystal of a parabolic Verma module: B(N) tensor B(V_l(lambda)).

Vertices are pairs (exponent array, hook tableau).  For i in I \\ {0} the
two-factor tensor rule applies with the statistics of the two sides (the
regimes i < m, i = m, i > m); f~_0 raises the exponent of the minimal
radical root and never vanishes, e~_0 is its partial inverse.  Truncated
graphs (by the degree of the array factor), highest-weight scans, greedy
reduction to the source and the branching of B(N) all live here.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import hooktab, radcrystal
from .hooktab import Partition, Tableau
from .radcrystal import RadArray
from .superroot import AlgebraType, bilinear, root_system, simple_roots, \
    wt_neg

PVElement = Tuple[RadArray, Tableau]


class GraphSizeError(RuntimeError):
    """Raised when a truncated crystal would exceed the vertex cap."""


def crystal_op(g: AlgebraType, i: int, v: PVElement, direction: str
               ) -> Optional[PVElement]:
    """f~_i / e~_i on a pair (array, tableau), or None for 0."""
    c, t = v
    if i == 0:
        cc = radcrystal.crystal_op(g, 0, c, direction)
        return None if cc is None else (cc, t)
    if i == g.m:
        act_left = bilinear(g, radcrystal.weight(g, c),
                            simple_roots(g)[g.m]) != 0
    else:
        eps_c, phi_c = radcrystal.eps_phi(g, i, c)
        eps_t, phi_t = hooktab.eps_phi(g, i, t)
        if i < g.m:
            if direction == "f":
                act_left = phi_c > eps_t
            else:
                act_left = phi_c >= eps_t
        else:
            if direction == "f":
                act_left = not (phi_t > eps_c)
            else:
                act_left = not (phi_t >= eps_c)
    if act_left:
        cc = radcrystal.crystal_op(g, i, c, direction)
        return None if cc is None else (cc, t)
    tt = hooktab.crystal_op(g, i, t, direction)
    return None if tt is None else (c, tt)


def source_vertex(g: AlgebraType, lam: Partition) -> PVElement:
    return (radcrystal.zero_array(g), hooktab.genuine_hw(g, lam))


def vertex_id(v: PVElement) -> str:
    c, t = v
    rows = "/".join(".".join(str(x) for x in r) for r in t)
    return ",".join(str(x) for x in c) + "|" + rows


def vertex_from_id(s: str) -> PVElement:
    left, _, rows = s.partition("|")
    c = tuple(int(x) for x in left.split(",")) if left else ()
    t = tuple(tuple(int(x) for x in r.split(".")) for r in rows.split("/")
              if r) if rows else ()
    return (c, t)


class CrystalGraph:
    """A truncated crystal graph: vertices and colored f~-edges."""

    def __init__(self, g: AlgebraType, lam: Partition, max_degree: int,
                 vertices: List[PVElement],
                 edges: List[Tuple[int, int, int]]):
        self.g = g
        self.lam = lam
        self.max_degree = max_degree
        self.vertices = vertices
        self.edges = edges  # (source index, color i, target index)

    def adjacency(self) -> Dict[str, List[Tuple[int, str]]]:
        ids = [vertex_id(v) for v in self.vertices]
        out: Dict[str, List[Tuple[int, str]]] = {vid: [] for vid in ids}
        for s, i, t in self.edges:
            out[ids[s]].append((i, ids[t]))
        for vid in out:
            out[vid].sort()
        return out

    def to_json(self) -> str:
        obj = {
            "algebra": {"family": self.g.family, "m": self.g.m, "n": self.g.n},
            "lambda": list(self.lam),
            "max_degree": self.max_degree,
            "vertices": sorted(vertex_id(v) for v in self.vertices),
            "edges": sorted([vertex_id(self.vertices[s]), i,
                             vertex_id(self.vertices[t])]
                            for s, i, t in self.edges),
        }
        return json.dumps(obj, sort_keys=True, indent=1)

    def to_dot(self) -> str:
        lines = ["digraph crystal {"]
        for vid in sorted(vertex_id(v) for v in self.vertices):
            lines.append('  "%s";' % vid)
        for sid, i, tid in sorted([vertex_id(self.vertices[s]), i,
                                   vertex_id(self.vertices[t])]
                                  for s, i, t in self.edges):
            lines.append('  "%s" -> "%s" [label="%d"];' % (sid, tid, i))
        lines.append("}")
        return "\n".join(lines) + "\n"


def adjacency_from_json(text: str) -> Dict[str, List[Tuple[int, str]]]:
    obj = json.loads(text)
    out: Dict[str, List[Tuple[int, str]]] = {v: [] for v in obj["vertices"]}
    for s, i, t in obj["edges"]:
        out[s].append((int(i), t))
    for v in out:
        out[v].sort()
    return out


def build_graph(g: AlgebraType, lam: Partition, max_degree: int,
                vertex_cap: int = 500000) -> CrystalGraph:
    """All pairs with array degree <= max_degree, with the f~-edges that stay
    inside the truncation."""
    lam = hooktab.normalize_partition(lam)
    arrays = radcrystal.enumerate_arrays(g, max_degree)
    tableaux = hooktab.enumerate_sst(g, lam)
    total = len(arrays) * len(tableaux)
    if total > vertex_cap:
        raise GraphSizeError("truncated crystal has %d vertices, cap is %d"
                             % (total, vertex_cap))
    vertices: List[PVElement] = [(c, t) for c in arrays for t in tableaux]
    index = {v: k for k, v in enumerate(vertices)}
    edges: List[Tuple[int, int, int]] = []
    for k, v in enumerate(vertices):
        for i in range(0, g.rank):
            w = crystal_op(g, i, v, "f")
            if w is None:
                continue
            kk = index.get(w)
            if kk is not None:
                edges.append((k, i, kk))
    return CrystalGraph(g, lam, max_degree, vertices, edges)


def hw_scan(g: AlgebraType, lam: Partition, max_degree: int
            ) -> List[PVElement]:
    """Vertices killed by every e~_i, i in I."""
    lam = hooktab.normalize_partition(lam)
    out = []
    tableaux = hooktab.enumerate_sst(g, lam)
    for c in radcrystal.enumerate_arrays(g, max_degree):
        for t in tableaux:
            v = (c, t)
            if all(crystal_op(g, i, v, "e") is None for i in range(0, g.rank)):
                out.append(v)
    return out


def greedy_reduction_report(g: AlgebraType, lam: Partition, max_degree: int
                            ) -> dict:
    """From every vertex, repeatedly apply the first nonzero e~_i; all paths
    must end at the unique source (truncation-safe connectedness proxy)."""
    lam = hooktab.normalize_partition(lam)
    src = source_vertex(g, lam)
    arrays = radcrystal.enumerate_arrays(g, max_degree)
    tableaux = hooktab.enumerate_sst(g, lam)
    reaches: Dict[PVElement, bool] = {src: True}
    stuck: List[PVElement] = []

    def reduce(v: PVElement) -> bool:
        seen = []
        while v not in reaches:
            seen.append(v)
            for i in range(0, g.rank):
                w = crystal_op(g, i, v, "e")
                if w is not None:
                    v = w
                    break
            else:
                reaches[v] = False
                stuck.append(v)
                break
        ok = reaches[v]
        for u in seen:
            reaches[u] = ok
        return ok

    bad = 0
    total = 0
    for c in arrays:
        for t in tableaux:
            total += 1
            if not reduce((c, t)):
                bad += 1
    return {"algebra": str(g), "lambda": list(lam), "max_degree": max_degree,
            "vertices": total, "failed": bad,
            "stuck": [vertex_id(v) for v in stuck[:10]],
            "ok": bad == 0}


def hw_scan_report(g: AlgebraType, lam: Partition, max_degree: int) -> dict:
    lam = hooktab.normalize_partition(lam)
    found = hw_scan(g, lam, max_degree)
    expect = source_vertex(g, lam)
    return {"algebra": str(g), "lambda": list(lam), "max_degree": max_degree,
            "found": [vertex_id(v) for v in found],
            "ok": found == [expect]}


# -- branching -------------------------------------------------------------------

def family_partitions(g: AlgebraType, max_size: int) -> List[Partition]:
    """The branching index set P(g) up to the given size: hook partitions,
    with all parts even for c, with even conjugate for d."""
    out = []
    for lam in hooktab.hook_partitions(g, max_size):
        if g.family == "c" and any(p % 2 for p in lam):
            continue
        if g.family == "d" and any(p % 2 for p in hooktab.conjugate(lam)):
            continue
        out.append(lam)
    return out


def eligible_partitions(g: AlgebraType, max_degree: int) -> List[Partition]:
    """Members of P(g) whose highest-weight array fits in the truncation."""
    rs = root_system(g)
    bound = max_degree if g.family == "b" else 2 * max_degree
    out = []
    for lam in family_partitions(g, bound):
        w = hooktab.hw_weight(g, lam)
        if rs.ht_of_weight(wt_neg(w)) <= max_degree:
            out.append(lam)
    return sorted(out)


def l_branching(g: AlgebraType, max_degree: int) -> dict:
    """Weights of the l-highest vertices of B(N) up to the truncation,
    converted to partitions and compared against the brute-force P(g)."""
    found: List[Partition] = []
    bad_weights = []
    for c in radcrystal.enumerate_arrays(g, max_degree):
        if all(radcrystal.crystal_op(g, i, c, "e") is None
               for i in range(1, g.rank)):
            w = radcrystal.weight(g, c)
            lam = hooktab.weight_to_hook(g, w)
            if lam is None:
                bad_weights.append(list(w))
            else:
                found.append(lam)
    expected = eligible_partitions(g, max_degree)
    dupes = sorted({x for x in found if found.count(x) > 1})
    ok = (not bad_weights and not dupes and sorted(found) == expected)
    return {"algebra": str(g), "max_degree": max_degree,
            "found": [list(x) for x in sorted(found)],
            "expected": [list(x) for x in expected],
            "non_hook_weights": bad_weights,
            "duplicates": [list(x) for x in dupes],
            "ok": ok}
