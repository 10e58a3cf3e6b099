"""Single-symbol machinery: recognition of simple Fitch digraphs and
construction of their unique least-resolved {symbol, NO_EVENT}-labeled trees.

Two independent recognizers are provided.  The constructive one builds the
least-resolved tree by a recursive source/component decomposition and
certifies its own output by re-evaluation; the triad scanner checks all
3-subsets against a machine-derived table of forbidden 3-vertex digraphs.
Their equivalence is established exhaustively in the test suite.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Optional

from .core import (
    NO_EVENT,
    FitchError,
    LabeledTree,
    TreeBuilder,
    check_token,
)
from .evaluate import evaluate


class NotFitch(FitchError):
    """The digraph is not explained by any single-symbol labeled tree."""


class AlphabetTooLarge(FitchError):
    """A tree handed to the single-symbol checker carries several symbols."""


class Digraph:
    """Irreflexive digraph on named vertices, with bitmask adjacency."""

    __slots__ = ("vertices", "_index", "_out", "_in")

    def __init__(self, vertices: Iterable[str], arcs: Iterable[tuple[str, str]]):
        vs = tuple(vertices)
        index = {}
        for nm in vs:
            check_token(nm, "vertex name")
            if nm in index:
                raise ValueError(f"duplicate vertex {nm!r}")
            index[nm] = len(index)
        out = [0] * len(vs)
        in_ = [0] * len(vs)
        for x, y in arcs:
            if x not in index or y not in index:
                raise ValueError(f"arc ({x!r}, {y!r}) leaves the vertex set")
            if x == y:
                raise ValueError(f"reflexive arc on {x!r}")
            i, j = index[x], index[y]
            out[i] |= 1 << j
            in_[j] |= 1 << i
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", in_)

    def __setattr__(self, name, value):
        raise AttributeError("Digraph is immutable")

    @classmethod
    def _from_masks(cls, vertices: tuple[str, ...], out: list[int], in_: list[int]) -> "Digraph":
        g = object.__new__(cls)
        object.__setattr__(g, "vertices", vertices)
        object.__setattr__(g, "_index", {nm: i for i, nm in enumerate(vertices)})
        object.__setattr__(g, "_out", out)
        object.__setattr__(g, "_in", in_)
        return g

    @property
    def n(self) -> int:
        return len(self.vertices)

    def has_arc(self, x: str, y: str) -> bool:
        return bool(self._out[self._index[x]] >> self._index[y] & 1)

    @property
    def arcs(self) -> frozenset:
        vs = self.vertices
        return frozenset(
            (vs[i], vs[j])
            for i, row in enumerate(self._out)
            for j in _bits(row)
        )

    def induced(self, names: Iterable[str]) -> "Digraph":
        keep = [self._index[nm] for nm in names]
        vs = tuple(self.vertices[i] for i in keep)
        sub = Digraph(vs, ())
        out = list(sub._out)
        in_ = list(sub._in)
        for a, gi in enumerate(keep):
            row = self._out[gi]
            for b, gj in enumerate(keep):
                if a != b and row >> gj & 1:
                    out[a] |= 1 << b
                    in_[b] |= 1 << a
        return Digraph._from_masks(vs, out, in_)

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and self.arcs == other.arcs

    def __repr__(self):
        return f"<Digraph {list(self.vertices)} arcs={sorted(self.arcs)}>"


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# arc slots of a 3-vertex digraph, in encoding order
_TRIAD_PAIRS = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))
_TRIAD_SLOT = {p: i for i, p in enumerate(_TRIAD_PAIRS)}


def _triad_mask(arcs: Iterable[tuple[int, int]]) -> int:
    m = 0
    for p in arcs:
        m |= 1 << _TRIAD_SLOT[p]
    return m


@lru_cache(maxsize=1)
def _canonical_triad() -> tuple[int, ...]:
    """canonical[mask] = minimal mask over the 6 vertex relabelings."""
    canon = []
    for mask in range(64):
        best = 63
        for perm in permutations(range(3)):
            img = _triad_mask(
                (perm[a], perm[b]) for a, b in _TRIAD_PAIRS if mask >> _TRIAD_SLOT[(a, b)] & 1
            )
            best = min(best, img)
        canon.append(best)
    return tuple(canon)


def _three_leaf_trees() -> list[LabeledTree]:
    """The four unlabeled 3-leaf phylogenetic shapes on leaves a, b, c."""
    specs = [
        (("a", NO_EVENT), ("b", NO_EVENT), ("c", NO_EVENT)),
        (((("a", NO_EVENT), ("b", NO_EVENT)), NO_EVENT), ("c", NO_EVENT)),
        (((("a", NO_EVENT), ("c", NO_EVENT)), NO_EVENT), ("b", NO_EVENT)),
        (((("b", NO_EVENT), ("c", NO_EVENT)), NO_EVENT), ("a", NO_EVENT)),
    ]
    return [LabeledTree.build(s) for s in specs]


class ForbiddenTriadTable:
    """The 3-vertex digraphs not realizable by any single-symbol tree."""

    __slots__ = ("canonical_masks", "_is_forbidden")

    def __init__(self, canonical_masks: frozenset):
        object.__setattr__(self, "canonical_masks", canonical_masks)
        canon = _canonical_triad()
        object.__setattr__(
            self, "_is_forbidden", tuple(canon[m] in canonical_masks for m in range(64))
        )

    def __setattr__(self, name, value):
        raise AttributeError("ForbiddenTriadTable is immutable")

    def __len__(self) -> int:
        return len(self.canonical_masks)

    def forbids_mask(self, mask: int) -> bool:
        return self._is_forbidden[mask]


@lru_cache(maxsize=1)
def derive_forbidden_table() -> ForbiddenTriadTable:
    """Derive the forbidden-triad table by exhausting all single-symbol
    labelings of the four 3-leaf tree shapes and complementing."""
    realizable = set()
    for shape in _three_leaf_trees():
        n_edges = shape.n_vertices - 1
        for bits in product((NO_EVENT, "1"), repeat=n_edges):
            labels = [None] + list(bits)
            fm = evaluate(shape.with_labels(labels))
            # leaves are a, b, c; positions in sorted order
            mask = _triad_mask(
                (i, j)
                for i, j in _TRIAD_PAIRS
                if fm.label("abc"[i], "abc"[j]) is not NO_EVENT
            )
            realizable.add(mask)
    canon = _canonical_triad()
    forbidden = frozenset(canon[m] for m in range(64) if m not in realizable)
    return ForbiddenTriadTable(forbidden)


def find_forbidden_triad(g: Digraph) -> Optional[tuple[str, str, str]]:
    """First 3-subset (by vertex order) inducing a forbidden digraph."""
    table = derive_forbidden_table()
    out = g._out
    forbids = table._is_forbidden
    for i, j, k in combinations(range(g.n), 3):
        oi, oj, ok = out[i], out[j], out[k]
        mask = (
            (oi >> j & 1)
            | (oi >> k & 1) << 1
            | (oj >> i & 1) << 2
            | (oj >> k & 1) << 3
            | (ok >> i & 1) << 4
            | (ok >> j & 1) << 5
        )
        if forbids[mask]:
            vs = g.vertices
            return (vs[i], vs[j], vs[k])
    return None


def is_simple_fitch(g: Digraph) -> bool:
    """Triad-scan recognizer; digraphs with at most 2 vertices always pass."""
    if g.n <= 2:
        return True
    return find_forbidden_triad(g) is None


def _sim_components(g: Digraph, members: int) -> list[int]:
    """Connected components (as bitmasks) of the relation x ~ y defined by
    'not both arcs xy and yx present', restricted to the member set."""
    both = [g._out[v] & g._in[v] for v in range(g.n)]
    comps = []
    remaining = members
    while remaining:
        low = remaining & -remaining
        remaining ^= low
        comp = low
        frontier = low
        while frontier:
            vbit = frontier & -frontier
            frontier ^= vbit
            v = vbit.bit_length() - 1
            moved = remaining & ~both[v]
            if moved:
                remaining &= both[v]
                comp |= moved
                frontier |= moved
        comps.append(comp)
    return comps


def least_resolved_simple(g: Digraph, symbol: str = "1") -> LabeledTree:
    """Build the unique least-resolved single-symbol tree explaining g.

    Recursive decomposition: vertices without incoming arcs become
    NO_EVENT leaf children of the local root; the rest splits into
    components of the 'not doubly linked' relation, each hung below a
    symbol edge (singletons as leaves, larger components recursively).
    The result is re-evaluated against g, so a wrong tree can never be
    returned; any structural dead end or verification mismatch raises
    NotFitch.
    """
    check_token(symbol, "symbol")
    if g.n == 0:
        raise ValueError("digraph must have at least one vertex")
    if g.n == 1:
        return LabeledTree.single_leaf(g.vertices[0])

    builder = TreeBuilder()
    vs = g.vertices
    stack: list[tuple[int, int, bool]] = [(builder.root(), (1 << g.n) - 1, True)]
    while stack:
        at, members, is_root = stack.pop()
        sources = [v for v in _bits(members) if g._in[v] & members == 0]
        if not is_root and not sources:
            raise NotFitch(
                "component {"
                + ", ".join(vs[v] for v in _bits(members))
                + "} has no vertex of in-degree 0"
            )
        zmask = 0
        for v in sources:
            zmask |= 1 << v
        rest = members ^ zmask
        comps = _sim_components(g, rest)
        if is_root and not sources and len(comps) == 1 and rest.bit_count() >= 2:
            raise NotFitch("all vertices are pairwise linked into one root component")
        for v in sources:
            builder.child(at, NO_EVENT, name=vs[v])
        for comp in comps:
            if comp & (comp - 1) == 0:
                builder.child(at, symbol, name=vs[comp.bit_length() - 1])
            else:
                stack.append((builder.child(at, symbol), comp, False))

    tree = builder.freeze()
    # mandatory self-verification, at code level to avoid materializing
    # the arc set as name pairs
    fm = evaluate(tree)
    perm = [fm._index[nm] for nm in vs]
    rev = list(reversed(perm))
    rows = fm._rows
    for a in range(g.n):
        row = rows[perm[a]]
        mask = int("".join("1" if row[j] > 0 else "0" for j in rev), 2)
        if mask != g._out[a]:
            raise NotFitch("constructed tree does not evaluate back to the digraph")
    return tree


def _structurally_least_resolved(tree: LabeledTree) -> bool:
    """No inner NO_EVENT edge, and every non-root inner vertex carries an
    outer NO_EVENT edge."""
    for _, v in tree.inner_edges():
        if tree.label(v) is NO_EVENT:
            return False
    for v in range(1, tree.n_vertices):
        if tree.is_inner(v):
            if not any(
                tree.is_leaf(c) and tree.label(c) is NO_EVENT for c in tree.children(v)
            ):
                return False
    return True


def is_least_resolved_simple(tree: LabeledTree) -> bool:
    """Structural least-resolvedness test for single-symbol trees."""
    symbols = tree.event_symbols()
    if len(symbols) > 1:
        raise AlphabetTooLarge(
            f"expected at most one event symbol, found {list(symbols)}"
        )
    return _structurally_least_resolved(tree)
