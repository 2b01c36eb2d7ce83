"""Trees, partitions, stabilization, and free tree modules."""

import random

import pytest

from propalg.coefficients import GroupSpec
from propalg.corpus import (
    binary_tree,
    path_tree,
    random_chain_partition,
    random_tree,
)
from propalg.tree_modules import (
    FiniteTree,
    FreeTreeModule,
    Partition,
    TreeModuleMap,
    brute_force_stabilize,
    free_dual,
    germ_equal,
    intersect_partitions,
    padded_standard_partition,
    required_copies,
    shifted_standard_partition,
    stabilize,
    standard_partition,
    validate_partition,
)

C5 = GroupSpec("cyclic", 5)


class TestFiniteTree:
    def test_no_root_rejected(self):
        with pytest.raises(ValueError, match="exactly one root"):
            FiniteTree([0, 0])

    def test_two_roots_rejected(self):
        with pytest.raises(ValueError, match="exactly one root"):
            FiniteTree([None, None])

    def test_bad_parent_rejected(self):
        with pytest.raises(ValueError, match="invalid parent"):
            FiniteTree([None, 7])

    def test_self_parent_rejected(self):
        with pytest.raises(ValueError, match="invalid parent"):
            FiniteTree([None, 1])

    def test_cycle_rejected(self):
        with pytest.raises(ValueError, match="cycle"):
            FiniteTree([None, 2, 1])

    def test_binary_tree_shape(self):
        t = binary_tree(2)
        assert t.n == 7
        assert t.root == 0
        assert t.depth == (0, 1, 1, 2, 2, 2, 2)
        assert t.max_depth == 2
        assert sorted(t.leaves()) == [3, 4, 5, 6]
        assert t.branch(1) == frozenset({1, 3, 4})
        assert t.branch(0) == frozenset(range(7))

    def test_ancestry(self):
        t = binary_tree(2)
        assert t.is_ancestor(1, 3)
        assert t.is_ancestor(3, 3)
        assert not t.is_ancestor(3, 1)
        assert not t.is_ancestor(1, 2)

    def test_json_round_trip(self):
        t = random_tree(random.Random(5))
        assert FiniteTree.from_json(t.to_json()) == t


class TestPartitionType:
    def test_unknown_label_rejected(self):
        t = path_tree(1)
        with pytest.raises(ValueError, match="not in S"):
            Partition(t, ["a"], {0: ["a", "b"]})

    def test_unknown_node_rejected(self):
        t = path_tree(1)
        with pytest.raises(ValueError, match="unknown nodes"):
            Partition(t, ["a"], {5: ["a"]})

    def test_missing_nodes_default_empty(self):
        t = path_tree(2)
        p = Partition(t, ["a"], {0: ["a"]})
        assert p.of(1) == frozenset()

    def test_json_round_trip(self):
        t = binary_tree(2)
        p = standard_partition(t)
        again = Partition.from_json(p.to_json())
        assert again == p

    def test_json_shape(self):
        t = path_tree(1)
        p = Partition(t, ["a"], {0: ["a"], 1: ["a"]})
        data = p.to_json()
        assert data == {"tree": [None, 0], "S": ["a"], "pi": {"0": ["a"], "1": ["a"]}}


class TestValidatePartition:
    def test_standard_is_valid(self):
        for t in (path_tree(3), binary_tree(2), FiniteTree([None])):
            report = validate_partition(standard_partition(t))
            assert report == {"valid": True, "axiom": None, "witness": None}

    def test_shifted_is_valid(self):
        t = binary_tree(3)
        assert validate_partition(shifted_standard_partition(t, 1))["valid"]
        assert validate_partition(shifted_standard_partition(t, 2))["valid"]

    def test_axiom_1_missing_at_root(self):
        t = path_tree(1)
        p = Partition(t, ["a", "b"], {0: ["a"], 1: ["a"]})
        report = validate_partition(p)
        assert not report["valid"]
        assert report["axiom"] == 1
        assert report["witness"] == {"labels": ["b"]}

    def test_functor_violation(self):
        t = path_tree(2)
        p = Partition(t, ["a"], {0: ["a"], 2: ["a"]})
        report = validate_partition(p)
        assert report["axiom"] == "functor"
        assert report["witness"]["node"] == 2
        assert report["witness"]["parent"] == 1
        assert report["witness"]["labels"] == ["a"]

    def test_disjointness_violation(self):
        # same label on two incomparable branches
        t = binary_tree(1)
        p = Partition(t, ["a"], {0: ["a"], 1: ["a"], 2: ["a"]})
        report = validate_partition(p)
        assert report["axiom"] == 2
        assert report["witness"] == {"nodes": [1, 2], "labels": ["a"]}

    def test_functor_checked_before_axiom_1(self):
        t = path_tree(2)
        p = Partition(t, ["a", "b"], {0: ["a"], 2: ["b"]})
        assert validate_partition(p)["axiom"] == "functor"

    def test_valid_verdict_not_exception(self):
        t = binary_tree(1)
        p = Partition(t, ["a"], {0: ["a"], 1: ["a"], 2: ["a"]})
        assert validate_partition(p)["valid"] is False


class TestRandomValidation:
    def test_standard_on_hundred_random_trees(self):
        rng = random.Random(20260815)
        for _ in range(100):
            t = random_tree(rng, max_depth=5)
            assert validate_partition(standard_partition(t))["valid"]

    def test_chain_partitions_valid(self):
        rng = random.Random(7)
        for _ in range(40):
            t = random_tree(rng, max_depth=4)
            p = random_chain_partition(rng, t, n_labels=rng.randrange(5))
            assert validate_partition(p)["valid"]


class TestIntersect:
    def test_self_intersection(self):
        t = binary_tree(2)
        p = standard_partition(t)
        assert intersect_partitions(p, p) == p

    def test_standard_meets_shifted(self):
        t = binary_tree(3)
        rho = standard_partition(t)
        shifted = shifted_standard_partition(t, 1)
        assert intersect_partitions(rho, shifted) == shifted
        assert intersect_partitions(shifted, rho) == shifted

    def test_contained_in_both(self):
        rng = random.Random(31)
        for _ in range(25):
            t = random_tree(rng, max_depth=4)
            a = random_chain_partition(rng, t, n_labels=3)
            b = random_chain_partition(rng, t, n_labels=3)
            lam = intersect_partitions(a, b)
            for q in t.nodes:
                assert lam.of(q) <= a.of(q)
                assert lam.of(q) <= b.of(q)

    def test_tree_mismatch(self):
        a = standard_partition(path_tree(1))
        b = standard_partition(path_tree(2))
        with pytest.raises(ValueError, match="different trees"):
            intersect_partitions(a, b)

    def test_label_mismatch(self):
        t = path_tree(1)
        a = Partition(t, ["a"], {0: ["a"]})
        b = Partition(t, ["b"], {0: ["b"]})
        with pytest.raises(ValueError, match="different label sets"):
            intersect_partitions(a, b)

    def test_invalid_inputs_surface(self):
        # both miss a label at the root, so the intersection fails axiom 1
        t = path_tree(1)
        a = Partition(t, ["a", "b"], {0: ["a"]})
        with pytest.raises(ValueError, match="axiom 1"):
            intersect_partitions(a, a)


class TestRequiredCopies:
    def test_no_labels(self):
        t = binary_tree(2)
        p = Partition(t, [], {})
        assert required_copies(p) == 1

    def test_leaf_label_forces_two(self):
        t = path_tree(3)
        p = Partition(t, ["s"], {q: ["s"] for q in t.nodes})
        assert required_copies(p) == 2

    def test_many_labels_at_point(self):
        t = FiniteTree([None])
        p = Partition(t, ["a", "b", "c"], {0: ["a", "b", "c"]})
        assert required_copies(p) == 4


class TestStabilize:
    def test_empty_labels_identity(self):
        t = binary_tree(2)
        p = Partition(t, [], {})
        alpha, cert = stabilize(p)
        assert cert["copies"] == 1
        assert alpha == {("vertex", v): (v, 1) for v in t.nodes}

    def test_path_with_leaf_label(self):
        # single label riding the whole chain; worked out by hand
        t = path_tree(3)
        p = Partition(t, ["s"], {q: ["s"] for q in t.nodes})
        alpha, cert = stabilize(p)
        assert cert["copies"] == 2
        assert alpha == {
            ("vertex", 0): (0, 1),
            ("vertex", 1): (1, 1),
            ("vertex", 2): (2, 1),
            ("vertex", 3): (3, 1),
            ("label", "s"): (3, 2),
        }

    def test_binary_tree_leaf_labels(self):
        t = binary_tree(2)
        assign = {}
        for leaf in t.leaves():
            s = f"s{leaf}"
            q = leaf
            while q is not None:
                assign.setdefault(q, set()).add(s)
                q = t.parent[q]
        p = Partition(t, [f"s{leaf}" for leaf in t.leaves()], assign)
        alpha, cert = stabilize(p)
        assert cert["copies"] == 2
        for leaf in t.leaves():
            assert alpha[("label", f"s{leaf}")] == (leaf, 2)

    def test_certificate_obligations(self):
        rng = random.Random(3)
        t = random_tree(rng, n_nodes=9, max_depth=3)
        p = random_chain_partition(rng, t, n_labels=4)
        alpha, cert = stabilize(p)
        assert cert["injective"]
        assert cert["hits_every_block"]
        assert cert["block_preserving"]
        assert cert["tau_report"]["valid"]
        assert cert["lambda_report"]["valid"]
        assert cert["lambda_in_tau"]
        assert cert["lambda_in_rho"]
        n = cert["copies"]
        assert cert["padding_surplus"] == n * t.n - t.n - len(p.labels)

    def test_alpha_block_preservation_rechecked(self):
        rng = random.Random(8)
        t = random_tree(rng, n_nodes=10, max_depth=4)
        p = random_chain_partition(rng, t, n_labels=3)
        alpha, cert = stabilize(p)
        # independent recomputation: a label lands inside its deepest branch
        for s in p.labels:
            carriers = [q for q in t.nodes if s in p.of(q)]
            deepest = max(carriers, key=lambda q: t.depth[q])
            w, c = alpha[("label", s)]
            assert w in t.branch(deepest)
            assert 1 <= c <= cert["copies"]

    def test_capacity_error_names_minimum(self):
        t = path_tree(3)
        p = Partition(t, ["s"], {q: ["s"] for q in t.nodes})
        with pytest.raises(ValueError, match="2 required"):
            stabilize(p, copies=1)

    def test_extra_copies_accepted(self):
        t = path_tree(2)
        p = Partition(t, ["s"], {q: ["s"] for q in t.nodes})
        alpha, cert = stabilize(p, copies=5)
        assert cert["copies"] == 5
        assert cert["required_copies"] == 2
        assert cert["injective"]

    def test_invalid_partition_rejected(self):
        t = binary_tree(1)
        p = Partition(t, ["a"], {0: ["a"], 1: ["a"], 2: ["a"]})
        with pytest.raises(ValueError, match="axiom 2"):
            stabilize(p)

    def test_fifty_generated_instances(self):
        rng = random.Random(20260815)
        for _ in range(50):
            t = random_tree(rng, max_depth=4)
            p = random_chain_partition(rng, t, n_labels=rng.randrange(5))
            alpha, cert = stabilize(p)
            assert cert["injective"]
            assert cert["hits_every_block"]
            assert cert["block_preserving"]
            assert cert["lambda_report"]["valid"]
            assert len(alpha) == t.n + len(p.labels)

    def test_brute_force_cross_check(self):
        rng = random.Random(99)
        checked = 0
        while checked < 20:
            t = random_tree(rng, n_nodes=rng.randrange(2, 8), max_depth=3)
            p = random_chain_partition(rng, t, n_labels=rng.randrange(1, 5))
            n = required_copies(p)
            assert brute_force_stabilize(p, n) is not None
            if n > 1:
                assert brute_force_stabilize(p, n - 1) is None
            checked += 1

    def test_brute_force_agrees_on_path_example(self):
        t = path_tree(3)
        p = Partition(t, ["s"], {q: ["s"] for q in t.nodes})
        found = brute_force_stabilize(p, 2)
        assert found is not None
        assert len(set(found.values())) == len(found)
        assert brute_force_stabilize(p, 1) is None


def _two_label_chain(depth=1):
    t = path_tree(depth)
    labels = ["a", "b"]
    return Partition(t, labels, {q: labels for q in t.nodes})


class TestFreeModules:
    def test_standard_ranks(self):
        t = binary_tree(2)
        m = FreeTreeModule(standard_partition(t), C5)
        assert m.rank(0) == 7
        assert m.rank(1) == 3
        assert m.rank(3) == 1
        assert m.basis(3) == [3]

    def test_dual_is_same_shaped(self):
        t = binary_tree(2)
        m = FreeTreeModule(standard_partition(t), C5)
        d = free_dual(m)
        assert d.side == "right"
        assert d.partition == m.partition
        for q in t.nodes:
            assert d.rank(q) == m.rank(q)

    def test_double_dual_identity(self):
        t = path_tree(2)
        m = FreeTreeModule(standard_partition(t), C5)
        assert free_dual(free_dual(m)) == m

    def test_bad_side_rejected(self):
        with pytest.raises(ValueError, match="side"):
            FreeTreeModule(standard_partition(path_tree(1)), C5, side="up")


class TestModuleMaps:
    def test_identity(self):
        m = FreeTreeModule(_two_label_chain(), C5)
        i = TreeModuleMap.identity(m)
        assert i.compose(i) == i

    def test_escaping_image_rejected(self):
        # child basis {b}, parent {a, b}: sending b to a at the root
        # is not compatible with the inclusion
        t = path_tree(1)
        p = Partition(t, ["a", "b"], {0: ["a", "b"], 1: ["b"]})
        m = FreeTreeModule(p, C5)
        one, zero = C5.one(), C5.zero()
        mats = {0: [[zero, one], [one, zero]], 1: [[one]]}
        with pytest.raises(ValueError, match="leaves the child basis"):
            TreeModuleMap(m, m, mats)

    def test_disagreement_rejected(self):
        t = path_tree(1)
        p = Partition(t, ["a", "b"], {0: ["a", "b"], 1: ["b"]})
        m = FreeTreeModule(p, C5)
        one, zero = C5.one(), C5.zero()
        mats = {0: [[one, zero], [zero, one]], 1: [[zero]]}
        with pytest.raises(ValueError, match="disagree"):
            TreeModuleMap(m, m, mats)

    def test_shape_rejected(self):
        m = FreeTreeModule(_two_label_chain(), C5)
        with pytest.raises(ValueError, match="shape"):
            TreeModuleMap(m, m, {0: [[C5.one()]]})

    def test_dual_contravariance(self):
        # (f o g)* = g* o f* for a basis permutation against a unit scale
        m = FreeTreeModule(_two_label_chain(2), C5)
        one, zero, g = C5.one(), C5.zero(), C5.monomial(1)
        swap = {q: [[zero, one], [one, zero]] for q in range(3)}
        diag = {q: [[g, zero], [zero, one]] for q in range(3)}
        f = TreeModuleMap(m, m, swap)
        h = TreeModuleMap(m, m, diag)
        assert f.compose(h).dual() == h.dual().compose(f.dual())

    def test_double_dual_of_map(self):
        m = FreeTreeModule(_two_label_chain(1), C5)
        one, zero, g = C5.one(), C5.zero(), C5.monomial(2)
        f = TreeModuleMap(m, m, {q: [[g, zero], [zero, one]] for q in range(2)})
        assert f.dual().dual() == f

    def test_dual_ranks_and_sides(self):
        m = FreeTreeModule(_two_label_chain(1), C5)
        f = TreeModuleMap.identity(m)
        d = f.dual()
        assert d.source.side == "right"
        assert d.source.rank(0) == 2

    def test_germ_equality(self):
        # label a exits at the root, so root columns over a are the only
        # place two compatible maps can differ
        t = path_tree(2)
        p = Partition(t, ["a", "b"], {0: ["a", "b"], 1: ["b"], 2: ["b"]})
        m = FreeTreeModule(p, C5)
        one, zero = C5.one(), C5.zero()
        eye = [[one, zero], [zero, one]]
        skew = [[one, zero], [one, one]]
        f = TreeModuleMap(m, m, {0: eye, 1: [[one]], 2: [[one]]})
        g = TreeModuleMap(m, m, {0: skew, 1: [[one]], 2: [[one]]})
        assert germ_equal(f, g, 1)
        assert not germ_equal(f, g, 0)

    def test_ring_mismatch(self):
        p = _two_label_chain()
        a = FreeTreeModule(p, C5)
        b = FreeTreeModule(p, GroupSpec("trivial"))
        with pytest.raises(ValueError, match="rings"):
            TreeModuleMap(a, b, {})

    def test_side_mismatch(self):
        p = _two_label_chain()
        a = FreeTreeModule(p, C5)
        with pytest.raises(ValueError, match="sides"):
            TreeModuleMap(a, a.dual(), {})
