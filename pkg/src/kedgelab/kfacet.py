"""k-edge tables, k-facet counts, chain decompositions, crossing counts.

A pair (p, q) of a certified point set is a k-edge when exactly k points lie
strictly below the line through p and q; it is a k-facet when either open side
of the line holds exactly k points.  The k-edge graph for one k decomposes
into at most k+1 convex chains and at most n-k-1 concave chains (x-monotone
paths whose edge slopes are monotone); the decomposition here is constructed
greedily left to right and then validated edge by edge, so a bad construction
can never masquerade as a good one.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .geom import Point2, PointSet, to_fraction


class KFacetError(Exception):
    pass


class UncertifiedInput(KFacetError):
    """The point set has not been certified general-position / no-vertical."""


class KOutOfRange(KFacetError):
    pass


class OnVertex(KFacetError):
    """The query line passes through a point of the set."""


class DegenerateIncidence(KFacetError):
    """An edge endpoint lies exactly on the query segment."""


class DecompositionFailure(KFacetError):
    """The greedy chain construction produced an invalid decomposition."""


def _require_certified(s: PointSet) -> None:
    if s.general_position is not True or s.no_vertical_pair is not True:
        raise UncertifiedInput(
            "point set must be certified (call geom.certify_position first)")


class KEdgeTable:
    """All pairs of a certified n-point set bucketed by exact below-count.

    per_k[k] holds id pairs (i, j) with i < j whose connecting line has
    exactly k points of the set strictly below it.  The buckets partition all
    C(n, 2) pairs.
    """

    __slots__ = ("n", "per_k")

    def __init__(self, n: int, per_k: Sequence[Sequence[Tuple[int, int]]]):
        self.n = n
        self.per_k = tuple(tuple(sorted(b)) for b in per_k)
        if len(self.per_k) != max(n - 1, 0):
            raise ValueError("table must have n-1 buckets (k = 0 .. n-2)")
        total = sum(len(b) for b in self.per_k)
        if total != n * (n - 1) // 2:
            raise ValueError("buckets must partition all pairs")

    def bucket(self, k: int) -> Tuple[Tuple[int, int], ...]:
        if not (0 <= k <= self.n - 2):
            raise KOutOfRange(f"k={k} outside 0..{self.n - 2}")
        return self.per_k[k]

    def __eq__(self, other):
        return (isinstance(other, KEdgeTable)
                and self.n == other.n and self.per_k == other.per_k)


class KEdgeGraph:
    """The k-edge graph: vertices are the points, edges one below-count bucket."""

    __slots__ = ("points", "k", "edges")

    def __init__(self, points: PointSet, k: int, edges: Sequence[Tuple[int, int]]):
        self.points = points
        self.k = k
        self.edges = tuple(sorted(tuple(sorted(e)) for e in edges))


def enumerate_k_edges_naive(s: PointSet) -> KEdgeTable:
    """Reference enumeration: O(n^3) direct below-count per pair."""
    _require_certified(s)
    n = len(s)
    ix, iy = s.int_coords()
    per_k: List[List[Tuple[int, int]]] = [[] for _ in range(max(n - 1, 0))]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = (i, j) if ix[i] < ix[j] else (j, i)
            dx = ix[b] - ix[a]
            dy = iy[b] - iy[a]
            c = 0
            for r in range(n):
                if r == i or r == j:
                    continue
                if dx * (iy[r] - iy[a]) - dy * (ix[r] - ix[a]) < 0:
                    c += 1
            per_k[c].append((i, j))
    return KEdgeTable(n, per_k)


def enumerate_k_edges_sweep(s: PointSet) -> KEdgeTable:
    """Rotational sweep enumeration, O(n^2 log n).

    For each source point the others are sorted by slope; sweeping a line
    through the source in increasing slope order, a point to the right of the
    source drops below the line exactly when the sweep passes its slope, and a
    point to the left rises above it.  Maintaining that running count gives
    the below-count of every pair at the moment its slope is crossed.
    """
    _require_certified(s)
    n = len(s)
    ix, iy = s.int_coords()
    per_k: List[List[Tuple[int, int]]] = [[] for _ in range(max(n - 1, 0))]
    for a in range(n):
        others = []
        left = 0
        for b in range(n):
            if b == a:
                continue
            dx = ix[b] - ix[a]
            others.append((Fraction(iy[b] - iy[a], dx), dx > 0, b))
            if dx < 0:
                left += 1
        others.sort(key=lambda t: t[0])
        cnt = left
        for slope, is_right, b in others:
            bc = cnt - (0 if is_right else 1)
            if b > a:
                per_k[bc].append((a, b))
            cnt += 1 if is_right else -1
    return KEdgeTable(n, per_k)


def k_edge_graph(s: PointSet, k: int, table: Optional[KEdgeTable] = None) -> KEdgeGraph:
    if table is None:
        table = enumerate_k_edges_sweep(s)
    return KEdgeGraph(s, k, table.bucket(k))


def count_k_facets(table: KEdgeTable, k: int) -> int:
    """Number of pairs with exactly k points in one of the two open halfplanes.

    A pair with below-count k or n-2-k qualifies; at the halving level the two
    coincide and are counted once.
    """
    n = table.n
    if not (0 <= k <= n - 2):
        raise KOutOfRange(f"k={k} outside 0..{n - 2}")
    mirror = n - 2 - k
    if mirror == k:
        return len(table.bucket(k))
    return len(table.bucket(k)) + len(table.bucket(mirror))


# ---------------------------------------------------------------------------
# chains


class Chain:
    """An x-monotone path of k-edges with monotone slopes.

    kind 'convex' means slopes strictly increase along the path,
    'concave' strictly decrease (general position forbids ties).
    """

    __slots__ = ("kind", "vertex_ids", "edges")

    def __init__(self, kind: str, vertex_ids: Sequence[int]):
        if kind not in ("convex", "concave"):
            raise ValueError("kind must be 'convex' or 'concave'")
        self.kind = kind
        self.vertex_ids = tuple(vertex_ids)
        self.edges = tuple(tuple(sorted((u, v)))
                           for u, v in zip(self.vertex_ids, self.vertex_ids[1:]))


class ChainDecomposition:
    __slots__ = ("graph", "kind", "chains")

    def __init__(self, graph: KEdgeGraph, kind: str, chains: Sequence[Chain]):
        self.graph = graph
        self.kind = kind
        self.chains = tuple(chains)

    def validate(self) -> None:
        """Check the partition, monotone-x, and monotone-slope invariants."""
        s = self.graph.points
        ix, iy = s.int_coords()
        seen: Dict[Tuple[int, int], int] = {}
        for ci, ch in enumerate(self.chains):
            if ch.kind != self.kind:
                raise DecompositionFailure("chain kind mismatch")
            xs = [ix[v] for v in ch.vertex_ids]
            if any(a >= b for a, b in zip(xs, xs[1:])):
                raise DecompositionFailure("x does not strictly increase along a chain")
            slopes = []
            for u, v in zip(ch.vertex_ids, ch.vertex_ids[1:]):
                slopes.append(Fraction(iy[v] - iy[u], ix[v] - ix[u]))
            for s1, s2 in zip(slopes, slopes[1:]):
                if self.kind == "convex" and not s1 < s2:
                    raise DecompositionFailure("convex chain slope not increasing")
                if self.kind == "concave" and not s1 > s2:
                    raise DecompositionFailure("concave chain slope not decreasing")
            for e in ch.edges:
                if e in seen:
                    raise DecompositionFailure(f"edge {e} used twice")
                seen[e] = ci
        missing = set(self.graph.edges) - set(seen)
        if missing:
            raise DecompositionFailure(f"edges not covered: {sorted(missing)}")


def _convex_chains(graph: KEdgeGraph) -> List[List[int]]:
    """Left-to-right greedy convex chain construction.

    At each vertex the incident k-edges, ordered by slope, alternate between
    incoming (left neighbor) and outgoing (right neighbor) because the
    below-count of a line rotating through the vertex crosses the k/(k+1)
    boundary alternately upward and downward.  Greedy matching of each
    incoming chain to the next steeper unused outgoing edge therefore
    continues chains whenever continuation is possible.
    """
    s = graph.points
    ix, iy = s.int_coords()

    def slope(u, v):
        return Fraction(iy[v] - iy[u], ix[v] - ix[u])

    out_at: Dict[int, List[int]] = {}
    for (u, v) in graph.edges:
        lft, rgt = (u, v) if ix[u] < ix[v] else (v, u)
        out_at.setdefault(lft, []).append(rgt)

    chains: List[List[int]] = []
    ending_at: Dict[int, List[int]] = {}  # vertex id -> chain indices ending there
    for v in sorted(range(len(s)), key=lambda i: ix[i]):
        ins = ending_at.pop(v, [])
        ins.sort(key=lambda ci: slope(chains[ci][-2], v))
        outs = sorted(out_at.get(v, []), key=lambda w: slope(v, w))
        used = [False] * len(outs)
        oi = 0
        for ci in ins:
            sin = slope(chains[ci][-2], v)
            while oi < len(outs) and slope(v, outs[oi]) < sin:
                oi += 1
            if oi < len(outs):
                used[oi] = True
                chains[ci].append(outs[oi])
                ending_at.setdefault(outs[oi], []).append(ci)
                oi += 1
            # else: chain ends at v
        for w, u in zip(outs, used):
            if not u:
                chains.append([v, w])
                ending_at.setdefault(w, []).append(len(chains) - 1)
    return chains


def chain_decomposition(graph: KEdgeGraph, kind: str) -> ChainDecomposition:
    """Decompose a k-edge graph into monotone chains and validate the result.

    Convex chains: at most k+1.  Concave chains: at most n-k-1, obtained by
    reflecting the plane upside down (which swaps the roles of the two open
    halfplanes, mapping the k-edge graph onto the (n-2-k)-edge graph of the
    reflected set) and reusing the convex construction.
    """
    s = graph.points
    n = len(s)
    k = graph.k
    if kind == "convex":
        paths = _convex_chains(graph)
        deco = ChainDecomposition(graph, "convex", [Chain("convex", p) for p in paths])
        bound = k + 1
    elif kind == "concave":
        flipped = PointSet([(p.x, -p.y) for p in s.points],
                           _gp=s.general_position, _nvp=s.no_vertical_pair)
        fg = KEdgeGraph(flipped, n - 2 - k, graph.edges)
        paths = _convex_chains(fg)
        deco = ChainDecomposition(graph, "concave", [Chain("concave", p) for p in paths])
        bound = n - k - 1
    else:
        raise ValueError("kind must be 'convex' or 'concave'")
    deco.validate()
    if graph.edges and len(deco.chains) > bound:
        raise DecompositionFailure(
            f"{kind} decomposition used {len(deco.chains)} chains, bound {bound}")
    return deco


# ---------------------------------------------------------------------------
# crossing counts


def vertical_crossings(graph: KEdgeGraph, x0) -> int:
    """Number of k-edges whose open x-span contains x0.

    x0 must not equal any point's x-coordinate.  Always at most
    min(k+1, n-k-1): a vertical line meets each monotone chain at most once.
    """
    s = graph.points
    x0 = to_fraction(x0)
    if any(p.x == x0 for p in s.points):
        raise OnVertex(f"x0={x0} hits a point of the set")
    c = 0
    for (u, v) in graph.edges:
        a, b = s.points[u].x, s.points[v].x
        if a > b:
            a, b = b, a
        if a < x0 < b:
            c += 1
    return c


def segment_crossings(graph: KEdgeGraph, a: Point2, b: Point2) -> int:
    """Number of k-edges properly crossing the open segment ab.

    Raises DegenerateIncidence when any edge endpoint lies on the closed
    segment ab; touching configurations otherwise do not count.
    """
    s = graph.points
    used_ids = sorted({i for e in graph.edges for i in e})
    for i in used_ids:
        p = s.points[i]
        d = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
        if d == 0:
            if min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y):
                raise DegenerateIncidence(f"point {i} lies on the query segment")
    def orient(p, q, r):
        d = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
        return (d > 0) - (d < 0)

    c = 0
    for (u, v) in graph.edges:
        p, q = s.points[u], s.points[v]
        if orient(a, b, p) * orient(a, b, q) < 0 and orient(p, q, a) * orient(p, q, b) < 0:
            c += 1
    return c


# ---------------------------------------------------------------------------
# CSV interchange


def table_to_csv(table: KEdgeTable) -> str:
    """Rows k,id_p,id_q sorted by (k, id_p, id_q)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "id_p", "id_q"])
    for k, bucket in enumerate(table.per_k):
        for (i, j) in bucket:
            w.writerow([k, i, j])
    return buf.getvalue()


def table_from_csv(text: str, n: int) -> KEdgeTable:
    rdr = csv.reader(io.StringIO(text))
    header = next(rdr)
    if header != ["k", "id_p", "id_q"]:
        raise ValueError(f"bad header {header!r}")
    per_k: List[List[Tuple[int, int]]] = [[] for _ in range(max(n - 1, 0))]
    for row in rdr:
        if not row:
            continue
        k, i, j = (int(v) for v in row)
        per_k[k].append((i, j))
    return KEdgeTable(n, per_k)


def decomposition_to_csv(deco: ChainDecomposition) -> str:
    """Rows chain_id,kind,position,id_p,id_q listing each chain's edges in order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["chain_id", "kind", "position", "id_p", "id_q"])
    for ci, ch in enumerate(deco.chains):
        for pos, (u, v) in enumerate(zip(ch.vertex_ids, ch.vertex_ids[1:])):
            w.writerow([ci, ch.kind, pos, u, v])
    return buf.getvalue()
