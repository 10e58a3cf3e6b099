import pytest

from fitchmap.core import (
    NO_EVENT,
    LabelConflict,
    LabeledTree,
    QuasiPartition,
    make_fitch_map,
)
from fitchmap.evaluate import evaluate, explains
from fitchmap.generalized import (
    AlphabetTooLarge,
    NotOtimesFree,
    T1Violation,
    T2Violation,
    T3Violation,
    T4Violation,
    assemble,
    check_conditions,
    compute_classes,
    is_least_resolved_general,
    recognize,
    recognize_no_otimes,
)
from fitchmap.oracle import random_tree_like_instance

EXAMPLE_TREE = LabeledTree.build(
    (((("a", NO_EVENT), ("b", "2")), "2"), ("c", NO_EVENT))
)
EXAMPLE_MAP = evaluate(EXAMPLE_TREE)


def all_no_event_map(names):
    return make_fitch_map(
        names, {(x, y): NO_EVENT for x in names for y in names if x != y}
    )


def column_constant_map(assignment):
    names = sorted(assignment)
    return make_fitch_map(
        names,
        {(y, x): assignment[x] for x in names for y in names if x != y},
    )


class TestComputeClasses:
    def test_all_no_event(self):
        qp = compute_classes(all_no_event_map(["a", "b", "c"]))
        assert qp.members(NO_EVENT) == frozenset("abc")

    def test_worked_example(self):
        qp = compute_classes(EXAMPLE_MAP)
        assert qp.members("2") == frozenset("ab")
        assert qp.members(NO_EVENT) == frozenset("c")

    def test_two_incoming_symbols(self):
        m = make_fitch_map(
            ["a", "b", "c"],
            {
                ("a", "c"): "1",
                ("b", "c"): "2",
                ("c", "a"): NO_EVENT,
                ("c", "b"): NO_EVENT,
                ("a", "b"): NO_EVENT,
                ("b", "a"): NO_EVENT,
            },
        )
        got = compute_classes(m)
        assert got == T1Violation(leaf="c", symbols=("1", "2"))


class TestCheckConditions:
    def test_worked_example_passes(self):
        qp = compute_classes(EXAMPLE_MAP)
        assert check_conditions(EXAMPLE_MAP, qp) is None

    def test_t3_violation(self):
        # x gets 1 from z only, y gets 2, but y fails to point 1 at x
        m = make_fitch_map(
            ["x", "y", "z"],
            {
                ("z", "x"): "1",
                ("y", "x"): NO_EVENT,
                ("x", "y"): "2",
                ("z", "y"): "2",
                ("x", "z"): NO_EVENT,
                ("y", "z"): NO_EVENT,
            },
        )
        qp = compute_classes(m)
        assert isinstance(qp, QuasiPartition)
        got = check_conditions(m, qp)
        assert got == T3Violation(x="x", y="y", expected="1", found=NO_EVENT)

    def test_t2_violation_with_planted_triad(self):
        # class of 'm' is {a, b, c} with internal arcs {a->b}: forbidden
        names = ["a", "b", "c", "d"]
        entries = {(x, y): NO_EVENT for x in names for y in names if x != y}
        entries[("a", "b")] = "m"
        entries[("d", "a")] = entries[("d", "b")] = entries[("d", "c")] = "m"
        m = make_fitch_map(names, entries)
        qp = compute_classes(m)
        assert qp.members("m") == frozenset("abc")
        got = check_conditions(m, qp)
        assert isinstance(got, T2Violation)
        assert got.symbol == "m"
        assert got.triad == ("a", "b", "c")

    def test_t4_is_rechecked(self):
        # hand-built classes that disagree with the map exercise the T4 path
        m = make_fitch_map(
            ["a", "b"], {("a", "b"): "1", ("b", "a"): NO_EVENT}
        )
        forged = QuasiPartition({NO_EVENT: {"a", "b"}, "1": set()})
        got = check_conditions(m, forged)
        assert got == T4Violation(x="b", y="a", found="1")


class TestRecognize:
    def test_two_leaf_hand_trace(self):
        m = make_fitch_map(["a", "b"], {("a", "b"): "1", ("b", "a"): "2"})
        rep = recognize(m)
        assert rep.tree_like
        assert rep.tree == LabeledTree.build((("a", "2"), ("b", "1")))
        assert explains(rep.tree, m)

    def test_all_no_event_gives_star(self):
        rep = recognize(all_no_event_map(["a", "b", "c", "d"]))
        assert rep.tree_like
        assert rep.tree == LabeledTree.build(
            tuple((nm, NO_EVENT) for nm in "abcd")
        )

    def test_t1_violation_reported(self):
        m = make_fitch_map(
            ["a", "b", "c"],
            {
                ("a", "c"): "1",
                ("b", "c"): "2",
                ("c", "a"): NO_EVENT,
                ("c", "b"): NO_EVENT,
                ("a", "b"): NO_EVENT,
                ("b", "a"): NO_EVENT,
            },
        )
        rep = recognize(m)
        assert not rep.tree_like
        assert rep.reason == T1Violation(leaf="c", symbols=("1", "2"))
        assert rep.to_json()["reason"] == "T1"

    def test_alphabet_guard(self):
        # 6 distinct symbols on 3 leaves exceed 2n - 2 = 4
        names = ["a", "b", "c"]
        pairs = [(x, y) for x in names for y in names if x != y]
        m = make_fitch_map(names, {p: str(i + 1) for i, p in enumerate(pairs)})
        rep = recognize(m)
        assert rep.reason == AlphabetTooLarge(size=6, limit=4)

    def test_worked_example_round_trip(self):
        rep = recognize(EXAMPLE_MAP)
        assert rep.tree == EXAMPLE_TREE

    def test_arc_orientation_end_to_end(self):
        # ordered pair (a, b) carrying a symbol means the event lies on the
        # path toward b, so b hangs below the event edge
        m = make_fitch_map(["a", "b"], {("a", "b"): "1", ("b", "a"): NO_EVENT})
        rep = recognize(m)
        assert rep.tree == LabeledTree.build((("a", NO_EVENT), ("b", "1")))
        assert evaluate(rep.tree) == m


class TestAssemble:
    def test_worked_example_assembly(self):
        qp = compute_classes(EXAMPLE_MAP)
        assert assemble(EXAMPLE_MAP, qp) == EXAMPLE_TREE

    def test_single_complete_class_identifies_root(self):
        names = ["a", "b", "c"]
        m = make_fitch_map(
            names, {(x, y): "m" for x in names for y in names if x != y}
        )
        qp = compute_classes(m)
        t = assemble(m, qp)
        assert t == LabeledTree.build(tuple((nm, "m") for nm in names))

    def test_all_no_event_class(self):
        m = all_no_event_map(["a", "b", "c"])
        t = assemble(m, compute_classes(m))
        assert t == LabeledTree.build(tuple((nm, NO_EVENT) for nm in "abc"))

    def test_single_class_with_inner_structure(self):
        # X = X_1 with a non-star least-resolved tree: the class tree is
        # returned as-is (hanging it below an extra edge would leave a
        # single-child root)
        source = LabeledTree.build(
            (((("a", NO_EVENT), ("b", "1")), "1"), ("c", "1"))
        )
        m = evaluate(source)
        assert m.alphabet == ("1",)
        qp = compute_classes(m)
        assert qp.members(NO_EVENT) == frozenset()
        t = assemble(m, qp)
        assert explains(t, m)
        assert is_least_resolved_general(t)


class TestIsLeastResolvedGeneral:
    def test_star_is_least_resolved(self):
        assert is_least_resolved_general(
            LabeledTree.build((("a", "1"), ("b", "2"), ("c", NO_EVENT)))
        )

    def test_inner_no_event_edge_fails(self):
        t = LabeledTree.build(
            (((("a", NO_EVENT), ("b", "1")), NO_EVENT), ("c", NO_EVENT))
        )
        assert not is_least_resolved_general(t)

    def test_recognizer_outputs_pass(self):
        for seed in range(30):
            _, fm = random_tree_like_instance(seed, 10, 3)
            rep = recognize(fm)
            assert rep.tree_like
            assert is_least_resolved_general(rep.tree)

    def test_conflicting_tree_raises(self):
        bad = LabeledTree.build(
            (((("a", NO_EVENT), ("b", "1")), "2"), ("c", NO_EVENT))
        )
        with pytest.raises(LabelConflict):
            is_least_resolved_general(bad)


class TestRecognizeNoOtimes:
    def test_complete_single_symbol(self):
        names = ["a", "b", "c"]
        m = make_fitch_map(
            names, {(x, y): "m" for x in names for y in names if x != y}
        )
        rep = recognize_no_otimes(m)
        assert rep.tree_like
        assert rep.tree == LabeledTree.build(tuple((nm, "m") for nm in names))

    def test_rejects_maps_with_no_event(self):
        with pytest.raises(NotOtimesFree):
            recognize_no_otimes(EXAMPLE_MAP)

    def test_failing_t1(self):
        m = make_fitch_map(
            ["a", "b", "c"],
            {
                ("a", "c"): "1",
                ("b", "c"): "2",
                ("c", "a"): "1",
                ("c", "b"): "1",
                ("a", "b"): "1",
                ("b", "a"): "1",
            },
        )
        rep = recognize_no_otimes(m)
        assert not rep.tree_like
        assert isinstance(rep.reason, T1Violation)

    def test_agrees_with_recognize(self, rng):
        names = [f"x{i}" for i in range(6)]
        for trial in range(120):
            assignment = {nm: str(rng.randrange(1, 4)) for nm in names}
            m = column_constant_map(assignment)
            if trial % 2:
                # mutate one entry to another symbol; stays NO_EVENT-free
                entries = dict(m.pairs())
                pair = sorted(entries)[rng.randrange(len(entries))]
                entries[pair] = str(rng.randrange(1, 5))
                m = make_fitch_map(m.leaves, entries)
            fast = recognize_no_otimes(m)
            full = recognize(m)
            assert fast.tree_like == full.tree_like
            if fast.tree_like:
                assert fast.tree.same_topology(full.tree)
