"""Value types shared by the whole package.

Maps on ordered leaf pairs (FitchMap), edge-labeled rooted trees
(LabeledTree), the per-symbol leaf classes (QuasiPartition) and rooted
triples.  Every type is immutable after construction and the constructors
validate all structural invariants, so the algorithms never re-check them.

Trees are stored in canonical form: vertices are renumbered in preorder
with the children of every vertex ordered by the smallest leaf name in
their subtree.  Two equal trees therefore have identical arrays, which
makes equality, hashing and topology comparison trivial.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

class FitchError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidToken(FitchError):
    """A symbol or leaf name violates the lexical rules."""


class ReservedToken(InvalidToken):
    """A symbol or leaf name collides with a serialization reserve."""


class TooFewLeaves(FitchError):
    pass


class DuplicateLeaf(FitchError):
    pass


class MissingEntry(FitchError):
    pass


class ReflexiveEntry(FitchError):
    pass


class UnknownLeaf(FitchError):
    pass


class SameLeaf(FitchError):
    pass


class NonPhylogenetic(FitchError):
    pass


class DuplicateLeafName(FitchError):
    pass


class LeafSetMismatch(FitchError):
    pass


class LeafSetNotContained(FitchError):
    pass


class OuterEdge(FitchError):
    pass


class UnknownEdge(FitchError):
    pass


class LabelConflict(FitchError):
    """Two distinct event symbols on a path that must carry at most one.

    Carries a witness: for pair conflicts the ordered pair (x, y) whose
    connecting path mixes the two symbols; for suppressed-path conflicts a
    textual description of the path.
    """

    def __init__(self, message: str, *, witness=None, symbols=()):
        super().__init__(message)
        self.witness = witness
        self.symbols = tuple(symbols)


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------

class NoEvent:
    """Singleton label of edges on which no event happened (serialized '-')."""

    __slots__ = ()
    _instance: Optional["NoEvent"] = None

    def __new__(cls) -> "NoEvent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NO_EVENT"

    def __reduce__(self):
        return (NoEvent, ())


NO_EVENT = NoEvent()

#: An edge/pair label: an event symbol (plain string) or NO_EVENT.
Label = Union[str, NoEvent]

_RESERVED_TOKENS = frozenset({"-", "."})
# structural characters of the .fm / .lnw / triples file formats
_FORBIDDEN_CHARS = frozenset("():,;|")


def check_token(token: str, role: str = "symbol") -> str:
    """Validate a symbol or leaf-name token; returns it unchanged."""
    if not isinstance(token, str) or not token:
        raise InvalidToken(f"{role} must be a non-empty string, got {token!r}")
    if token in _RESERVED_TOKENS:
        raise ReservedToken(f"{role} {token!r} is reserved for serialization")
    for ch in token:
        if ch.isspace() or ch in _FORBIDDEN_CHARS:
            raise InvalidToken(f"{role} {token!r} contains forbidden character {ch!r}")
    return token


def label_token(label: Label) -> str:
    """Serialized form of a label: the symbol itself, or '-' for NO_EVENT."""
    return "-" if label is NO_EVENT else label


# ---------------------------------------------------------------------------
# rooted triples
# ---------------------------------------------------------------------------

class RootedTriple:
    """The rooted triple ab|c; {a, b} is unordered, so ab|c == ba|c."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a: str, b: str, c: str):
        if len({a, b, c}) != 3:
            raise SameLeaf(f"triple leaves must be pairwise distinct: {a}, {b}, {c}")
        if b < a:
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("RootedTriple is immutable")

    def __eq__(self, other):
        if not isinstance(other, RootedTriple):
            return NotImplemented
        return (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def __lt__(self, other):
        return (self.a, self.b, self.c) < (other.a, other.b, other.c)

    def __repr__(self):
        return f"{self.a}{self.b}|{self.c}"

    @property
    def leaves(self) -> frozenset:
        return frozenset((self.a, self.b, self.c))


class TripleSet:
    """An immutable set of rooted triples together with its leaf universe."""

    __slots__ = ("triples", "leaves")

    def __init__(self, triples: Iterable[RootedTriple] = ()):
        ts = frozenset(triples)
        for t in ts:
            if not isinstance(t, RootedTriple):
                raise TypeError(f"not a RootedTriple: {t!r}")
        object.__setattr__(self, "triples", ts)
        universe = set()
        for t in ts:
            universe |= t.leaves
        object.__setattr__(self, "leaves", frozenset(universe))

    def __setattr__(self, name, value):
        raise AttributeError("TripleSet is immutable")

    def __iter__(self) -> Iterator[RootedTriple]:
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)

    def __contains__(self, t) -> bool:
        return t in self.triples

    def __eq__(self, other):
        if not isinstance(other, TripleSet):
            return NotImplemented
        return self.triples == other.triples

    def __hash__(self):
        return hash(self.triples)

    def __le__(self, other: "TripleSet") -> bool:
        return self.triples <= other.triples

    def __repr__(self):
        inner = ", ".join(repr(t) for t in sorted(self.triples))
        return f"TripleSet({{{inner}}})"


# ---------------------------------------------------------------------------
# labeled trees
# ---------------------------------------------------------------------------

class LabeledTree:
    """Rooted phylogenetic tree with an edge label on every edge.

    The edge above vertex v carries label(v); the root (vertex 0 after
    canonicalization) has no edge and label(root) is None.  Leaf positions
    follow the canonical preorder, and span(v) gives the half-open interval
    of leaf positions below v.
    """

    __slots__ = (
        "_parent", "_children", "_labels", "_names",
        "_name2v", "_depth", "_span", "_leafv",
    )

    def __init__(
        self,
        parents: Sequence[Optional[int]],
        labels: Sequence[Optional[Label]],
        names: Mapping[int, str],
        *,
        _allow_single: bool = False,
    ):
        n = len(parents)
        if len(labels) != n:
            raise ValueError("parents and labels must have equal length")
        roots = [v for v, p in enumerate(parents) if p is None]
        if len(roots) != 1:
            raise NonPhylogenetic(f"tree must have exactly one root, found {len(roots)}")
        root = roots[0]

        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parents):
            if p is None:
                continue
            if not (0 <= p < n):
                raise NonPhylogenetic(f"vertex {v} has out-of-range parent {p}")
            children[p].append(v)

        order: list[int] = []
        stack = [root]
        seen = [False] * n
        seen[root] = True
        while stack:
            v = stack.pop()
            order.append(v)
            for c in children[v]:
                if seen[c]:
                    raise NonPhylogenetic("parent structure contains a cycle")
                seen[c] = True
                stack.append(c)
        if len(order) != n:
            raise NonPhylogenetic("tree is disconnected")

        leaves = [v for v in range(n) if not children[v]]
        if set(names) != set(leaves):
            raise NonPhylogenetic("leaf_name must be a bijection on the leaf vertices")
        seen_names = set()
        for v in leaves:
            nm = check_token(names[v], "leaf name")
            if nm in seen_names:
                raise DuplicateLeafName(f"duplicate leaf name {nm!r}")
            seen_names.add(nm)

        if n == 1:
            if not _allow_single:
                raise NonPhylogenetic("a phylogenetic tree needs at least two leaves")
        else:
            for v in range(n):
                if children[v] and len(children[v]) < 2:
                    kind = "root" if v == root else "inner vertex"
                    raise NonPhylogenetic(f"{kind} has a single child (degree-2 vertex)")
            for v in range(n):
                if v != root and labels[v] is not NO_EVENT:
                    lab = labels[v]
                    if not isinstance(lab, str):
                        raise InvalidToken(f"edge label must be a symbol or NO_EVENT, got {lab!r}")
                    check_token(lab, "edge label")

        # canonical order: children sorted by smallest leaf name in subtree
        minleaf: list[str] = [""] * n
        for v in reversed(order):
            minleaf[v] = names[v] if not children[v] else min(minleaf[c] for c in children[v])
        for v in range(n):
            children[v].sort(key=lambda c: minleaf[c])

        # preorder renumbering
        new_of = [0] * n
        stack = [root]
        idx = 0
        while stack:
            v = stack.pop()
            new_of[v] = idx
            idx += 1
            for c in reversed(children[v]):
                stack.append(c)

        new_parent = [-1] * n
        new_labels: list[Optional[Label]] = [None] * n
        new_names: list[Optional[str]] = [None] * n
        new_children: list[tuple[int, ...]] = [()] * n
        for v in range(n):
            nv = new_of[v]
            p = parents[v]
            new_parent[nv] = -1 if p is None else new_of[p]
            new_labels[nv] = None if p is None else labels[v]
            if not children[v]:
                new_names[nv] = names[v]
            new_children[nv] = tuple(sorted(new_of[c] for c in children[v]))

        depth = [0] * n
        for v in range(1, n):
            depth[v] = depth[new_parent[v]] + 1

        # forward pass assigns leaf positions, reverse pass folds them up
        pos = 0
        leafv: list[int] = []
        lo = [0] * n
        hi = [0] * n
        for v in range(n):
            if not new_children[v]:
                lo[v] = pos
                hi[v] = pos + 1
                pos += 1
                leafv.append(v)
        for v in range(n - 1, -1, -1):
            kids = new_children[v]
            if kids:
                lo[v] = lo[kids[0]]
                hi[v] = hi[kids[-1]]
        span = [(lo[v], hi[v]) for v in range(n)]

        object.__setattr__(self, "_parent", tuple(new_parent))
        object.__setattr__(self, "_children", tuple(new_children))
        object.__setattr__(self, "_labels", tuple(new_labels))
        object.__setattr__(self, "_names", tuple(new_names))
        object.__setattr__(self, "_name2v", {new_names[v]: v for v in leafv})
        object.__setattr__(self, "_depth", tuple(depth))
        object.__setattr__(self, "_span", tuple(span))
        object.__setattr__(self, "_leafv", tuple(leafv))

    def __setattr__(self, name, value):
        raise AttributeError("LabeledTree is immutable")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def build(cls, spec) -> "LabeledTree":
        """Build a tree from a nested spec.

        A spec is either a leaf name (str) or a sequence of (child_spec,
        label) pairs describing the children of an inner vertex.
        """
        parents: list[Optional[int]] = []
        labels: list[Optional[Label]] = []
        names: dict[int, str] = {}

        def add(node, parent: Optional[int], label: Optional[Label]) -> None:
            vid = len(parents)
            parents.append(parent)
            labels.append(label)
            if isinstance(node, str):
                names[vid] = node
            else:
                for child, lab in node:
                    add(child, vid, lab)

        add(spec, None, None)
        return cls(parents, labels, names)

    @classmethod
    def single_leaf(cls, name: str) -> "LabeledTree":
        """Degenerate one-leaf tree; not phylogenetic, for internal plumbing."""
        return cls([None], [None], {0: name}, _allow_single=True)

    def with_labels(self, labels: Sequence[Optional[Label]]) -> "LabeledTree":
        """Clone with new edge labels (same topology; skips revalidation).

        Canonical vertex order only depends on leaf names, so relabeling
        preserves it.
        """
        if len(labels) != len(self._parent):
            raise ValueError("label sequence has wrong length")
        new = object.__new__(LabeledTree)
        object.__setattr__(new, "_parent", self._parent)
        object.__setattr__(new, "_children", self._children)
        lab = list(labels)
        lab[0] = None
        object.__setattr__(new, "_labels", tuple(lab))
        object.__setattr__(new, "_names", self._names)
        object.__setattr__(new, "_name2v", self._name2v)
        object.__setattr__(new, "_depth", self._depth)
        object.__setattr__(new, "_span", self._span)
        object.__setattr__(new, "_leafv", self._leafv)
        return new

    # -- basic accessors -----------------------------------------------------

    @property
    def root(self) -> int:
        return 0

    @property
    def n_vertices(self) -> int:
        return len(self._parent)

    @property
    def n_leaves(self) -> int:
        return len(self._leafv)

    @property
    def is_phylogenetic(self) -> bool:
        return self.n_leaves >= 2

    @property
    def leaf_names(self) -> tuple[str, ...]:
        """Leaf names in canonical (preorder) position order."""
        return tuple(self._names[v] for v in self._leafv)

    @property
    def leaf_vertices(self) -> tuple[int, ...]:
        return self._leafv

    def parent(self, v: int) -> Optional[int]:
        p = self._parent[v]
        return None if p < 0 else p

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def label(self, v: int) -> Optional[Label]:
        """Label of the edge above v (None for the root)."""
        return self._labels[v]

    def is_leaf(self, v: int) -> bool:
        return not self._children[v]

    def is_inner(self, v: int) -> bool:
        return bool(self._children[v])

    def name(self, v: int) -> Optional[str]:
        return self._names[v]

    def vertex_of(self, name: str) -> int:
        try:
            return self._name2v[name]
        except KeyError:
            raise UnknownLeaf(f"no leaf named {name!r}") from None

    def depth(self, v: int) -> int:
        return self._depth[v]

    def span(self, v: int) -> tuple[int, int]:
        """Half-open interval of leaf positions below v."""
        return self._span[v]

    def edges(self) -> Iterator[tuple[int, int]]:
        """All edges as (parent, child), children in canonical order."""
        for v in range(1, self.n_vertices):
            yield self._parent[v], v

    def inner_edges(self) -> Iterator[tuple[int, int]]:
        for v in range(1, self.n_vertices):
            if self._children[v]:
                yield self._parent[v], v

    def event_symbols(self) -> tuple[str, ...]:
        """Sorted distinct non-NO_EVENT labels occurring on the edges."""
        return tuple(sorted({l for l in self._labels[1:] if l is not NO_EVENT}))

    def subtree_leaves(self, v: int) -> tuple[str, ...]:
        lo, hi = self._span[v]
        return tuple(self._names[u] for u in self._leafv[lo:hi])

    def clusters(self) -> frozenset:
        """Leaf-name sets of every subtree (including singletons and X)."""
        return frozenset(frozenset(self.subtree_leaves(v)) for v in range(self.n_vertices))

    # -- comparison ----------------------------------------------------------

    def topology_key(self):
        """Canonical label-free form; equal keys mean equal topologies."""
        # postorder with an explicit stack; deep chains must not recurse
        done: dict[int, object] = {}
        stack: list[tuple[int, bool]] = [(0, False)]
        while stack:
            v, expanded = stack.pop()
            if self.is_leaf(v):
                done[v] = self._names[v]
            elif expanded:
                done[v] = tuple(done[c] for c in self._children[v])
            else:
                stack.append((v, True))
                stack.extend((c, False) for c in self._children[v])
        return done[0]

    def same_topology(self, other: "LabeledTree") -> bool:
        return self.topology_key() == other.topology_key()

    def __eq__(self, other):
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return (
            self._parent == other._parent
            and self._labels == other._labels
            and self._names == other._names
        )

    def __hash__(self):
        return hash((self._parent, self._labels, self._names))

    def _text(self) -> str:
        """Canonical serialized form of the rooted-tree body (no ';')."""
        done: dict[int, str] = {}
        stack: list[tuple[int, bool]] = [(0, False)]
        while stack:
            v, expanded = stack.pop()
            if self.is_leaf(v):
                done[v] = self._names[v]
            elif expanded:
                parts = (
                    f"{done[c]}:{label_token(self._labels[c])}" for c in self._children[v]
                )
                done[v] = "(" + ",".join(parts) + ")"
            else:
                stack.append((v, True))
                stack.extend((c, False) for c in self._children[v])
        return done[0]

    def __repr__(self):
        return f"<LabeledTree {self._text()};>"


class TreeBuilder:
    """Mutable helper assembling a LabeledTree bottom-up."""

    def __init__(self):
        self._parents: list[Optional[int]] = []
        self._labels: list[Optional[Label]] = []
        self._names: dict[int, str] = {}

    def root(self) -> int:
        if self._parents:
            raise ValueError("root already created")
        self._parents.append(None)
        self._labels.append(None)
        return 0

    def child(self, parent: int, label: Label, name: Optional[str] = None) -> int:
        vid = len(self._parents)
        self._parents.append(parent)
        self._labels.append(label)
        if name is not None:
            self._names[vid] = name
        return vid

    def graft_children(self, at: int, tree: LabeledTree) -> None:
        """Attach copies of tree's root children below `at` (roots identified)."""
        mapping = {tree.root: at}
        for p, v in tree.edges():
            mapping[v] = self.child(mapping[p], tree.label(v), tree.name(v))

    def freeze(self) -> LabeledTree:
        return LabeledTree(self._parents, self._labels, self._names)


# ---------------------------------------------------------------------------
# maps on ordered leaf pairs
# ---------------------------------------------------------------------------

class FitchMap:
    """A total map from ordered distinct leaf pairs to labels.

    Internally the entries live in an n x n code matrix: 0 is NO_EVENT,
    code i >= 1 is alphabet[i-1], and the diagonal holds -1.  The alphabet
    is always exactly the set of symbols that occur (surjectivity).
    """

    __slots__ = ("leaves", "alphabet", "_index", "_rows")

    def __init__(self, leaves: Sequence[str], alphabet: Sequence[str], rows: list[list[int]]):
        object.__setattr__(self, "leaves", tuple(leaves))
        object.__setattr__(self, "alphabet", tuple(alphabet))
        object.__setattr__(self, "_index", {nm: i for i, nm in enumerate(self.leaves)})
        object.__setattr__(self, "_rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("FitchMap is immutable")

    @property
    def n(self) -> int:
        return len(self.leaves)

    def decode(self, code: int) -> Label:
        return NO_EVENT if code == 0 else self.alphabet[code - 1]

    def label(self, x: str, y: str) -> Label:
        try:
            i = self._index[x]
            j = self._index[y]
        except KeyError as e:
            raise UnknownLeaf(f"no leaf named {e.args[0]!r}") from None
        if i == j:
            raise ReflexiveEntry(f"the map is not defined on ({x}, {x})")
        return self.decode(self._rows[i][j])

    def pairs(self) -> Iterator[tuple[tuple[str, str], Label]]:
        leaves = self.leaves
        for i, row in enumerate(self._rows):
            for j, code in enumerate(row):
                if i != j:
                    yield (leaves[i], leaves[j]), self.decode(code)

    def event_arcs(self) -> frozenset:
        """Ordered pairs whose label is an event symbol."""
        leaves = self.leaves
        return frozenset(
            (leaves[i], leaves[j])
            for i, row in enumerate(self._rows)
            for j, code in enumerate(row)
            if code > 0
        )

    @property
    def otimes_free(self) -> bool:
        return all(0 not in row for row in self._rows)

    def encoding(self, order: Optional[Sequence[str]] = None) -> tuple:
        """Entry matrix as nested label tuples in the given leaf order."""
        if order is None:
            return tuple(
                tuple(None if c == -1 else self.decode(c) for c in row) for row in self._rows
            )
        try:
            perm = [self._index[nm] for nm in order]
        except KeyError as e:
            raise UnknownLeaf(f"no leaf named {e.args[0]!r}") from None
        rows = self._rows
        return tuple(
            tuple(None if i == j else self.decode(rows[i][j]) for j in perm) for i in perm
        )

    def __eq__(self, other):
        if not isinstance(other, FitchMap):
            return NotImplemented
        if set(self.leaves) != set(other.leaves):
            return False
        order = sorted(self.leaves)
        return self.encoding(order) == other.encoding(order)

    def __repr__(self):
        return f"<FitchMap on {self.n} leaves, alphabet {list(self.alphabet)}>"


def make_fitch_map(
    leaves: Sequence[str],
    entries: Mapping[tuple[str, str], Label],
) -> FitchMap:
    """Validate and build a FitchMap; the alphabet is normalized to the
    symbols that actually occur."""
    leaves = tuple(leaves)
    if len(leaves) < 2:
        raise TooFewLeaves(f"a map needs at least 2 leaves, got {len(leaves)}")
    index: dict[str, int] = {}
    for nm in leaves:
        check_token(nm, "leaf name")
        if nm in index:
            raise DuplicateLeaf(f"duplicate leaf {nm!r}")
        index[nm] = len(index)

    n = len(leaves)
    symbols = set()
    for (x, y), lab in entries.items():
        if x not in index or y not in index:
            missing = x if x not in index else y
            raise UnknownLeaf(f"entry mentions unknown leaf {missing!r}")
        if x == y:
            raise ReflexiveEntry(f"entry on reflexive pair ({x}, {x})")
        if lab is not NO_EVENT:
            if not isinstance(lab, str):
                raise InvalidToken(f"label must be a symbol or NO_EVENT, got {lab!r}")
            symbols.add(lab)
    for s in symbols:
        check_token(s, "symbol")

    alphabet = tuple(sorted(symbols))
    code = {s: i + 1 for i, s in enumerate(alphabet)}
    rows = [[-1] * n for _ in range(n)]
    for i, x in enumerate(leaves):
        row = rows[i]
        for j, y in enumerate(leaves):
            if i == j:
                continue
            try:
                lab = entries[(x, y)]
            except KeyError:
                raise MissingEntry(f"no entry for ordered pair ({x}, {y})") from None
            row[j] = 0 if lab is NO_EVENT else code[lab]
    return FitchMap(leaves, alphabet, rows)


# ---------------------------------------------------------------------------
# quasi-partition of the leaf set
# ---------------------------------------------------------------------------

class QuasiPartition:
    """Leaf classes keyed by label: one class per symbol plus the NO_EVENT
    class; pairwise disjoint, covering, with at most one empty member."""

    __slots__ = ("classes", "_class_of")

    def __init__(self, classes: Mapping[Label, Iterable[str]]):
        cls = {lab: frozenset(members) for lab, members in classes.items()}
        if NO_EVENT not in cls:
            raise ValueError("quasi-partition must include the NO_EVENT class")
        class_of: dict[str, Label] = {}
        empties = 0
        for lab, members in cls.items():
            if not members:
                empties += 1
            for nm in members:
                if nm in class_of:
                    raise ValueError(f"leaf {nm!r} appears in two classes")
                class_of[nm] = lab
        if empties > 1:
            raise ValueError("more than one empty class")
        object.__setattr__(self, "classes", cls)
        object.__setattr__(self, "_class_of", class_of)

    def __setattr__(self, name, value):
        raise AttributeError("QuasiPartition is immutable")

    def members(self, label: Label) -> frozenset:
        return self.classes[label]

    def class_of(self, name: str) -> Label:
        try:
            return self._class_of[name]
        except KeyError:
            raise UnknownLeaf(f"no leaf named {name!r}") from None

    @property
    def universe(self) -> frozenset:
        return frozenset(self._class_of)

    def __eq__(self, other):
        if not isinstance(other, QuasiPartition):
            return NotImplemented
        return self.classes == other.classes

    def __repr__(self):
        parts = ", ".join(
            f"{label_token(lab)}:{sorted(m)}" for lab, m in sorted(
                self.classes.items(), key=lambda kv: label_token(kv[0])
            )
        )
        return f"<QuasiPartition {parts}>"
