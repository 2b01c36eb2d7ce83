"""Label partitions on finite rooted trees and the free modules they span.

A partition assigns a finite label set to every branch of a rooted tree,
functorially in the branch and disjointly across incomparable branches.
The main operation, stabilize(), produces an explicit block matching that
absorbs the labels into copies of the vertex partition, together with a
certificate that can be checked independently.
"""

from .coefficients import rmat_involve_transpose, rmat_mul

__all__ = [
    "FiniteTree",
    "Partition",
    "FreeTreeModule",
    "TreeModuleMap",
    "validate_partition",
    "standard_partition",
    "shifted_standard_partition",
    "padded_standard_partition",
    "intersect_partitions",
    "stabilize",
    "brute_force_stabilize",
    "free_dual",
    "germ_equal",
]


def _label_key(x):
    # deterministic order for heterogeneous label sets
    return (x.__class__.__name__, str(x))


def _sorted_labels(xs):
    return sorted(xs, key=_label_key)


class FiniteTree:
    """Rooted tree on nodes 0..n-1 given by a parent array.

    Exactly one entry is None (the root).  The branch at a node p is the
    set of descendants of p, p included; the branch at the root is the
    whole tree.  Distinct branches are either nested or disjoint, which
    is what makes the partition axioms meaningful.
    """

    def __init__(self, parent):
        parent = tuple(parent)
        n = len(parent)
        if n == 0:
            raise ValueError("tree must have at least one node")
        roots = [i for i, q in enumerate(parent) if q is None]
        if len(roots) != 1:
            raise ValueError("tree must have exactly one root (parent None)")
        self.root = roots[0]
        for i, q in enumerate(parent):
            if q is not None and (not isinstance(q, int) or not 0 <= q < n or q == i):
                raise ValueError(f"node {i}: invalid parent {q!r}")
        self.parent = parent
        self.n = n

        kids = [[] for _ in range(n)]
        for i, q in enumerate(parent):
            if q is not None:
                kids[q].append(i)
        self.children = tuple(tuple(k) for k in kids)

        # depth by walking up; also detects cycles
        depth = [None] * n
        depth[self.root] = 0
        for i in range(n):
            trail = []
            j = i
            while depth[j] is None:
                trail.append(j)
                j = parent[j]
                if j is None or len(trail) > n:
                    raise ValueError("parent array contains a cycle")
            for k, node in enumerate(reversed(trail)):
                depth[node] = depth[j] + k + 1
        self.depth = tuple(depth)
        self.max_depth = max(depth)

        branches = [None] * n
        for p in sorted(range(n), key=lambda q: -depth[q]):
            acc = {p}
            for c in self.children[p]:
                acc |= branches[c]
            branches[p] = frozenset(acc)
        self._branch = tuple(branches)

    @property
    def nodes(self):
        return range(self.n)

    def branch(self, p):
        return self._branch[p]

    def is_ancestor(self, p, q):
        """True when q lies in the branch at p (p == q counts)."""
        return q in self._branch[p]

    def leaves(self):
        return [p for p in range(self.n) if not self.children[p]]

    def __eq__(self, other):
        return isinstance(other, FiniteTree) and self.parent == other.parent

    def __hash__(self):
        return hash(self.parent)

    def __repr__(self):
        return f"FiniteTree({list(self.parent)})"

    def to_json(self):
        return {"tree": [q for q in self.parent]}

    @classmethod
    def from_json(cls, data):
        return cls(data["tree"])


class Partition:
    """Assignment of a subset of a finite label set S to every branch.

    Stored per node: the set attached to the branch rooted there; the
    root entry is the value on the whole tree.  The constructor only
    checks shape.  Whether the assignment satisfies the partition axioms
    is a verdict, produced by validate_partition().
    """

    def __init__(self, tree, labels, assign):
        if not isinstance(tree, FiniteTree):
            raise ValueError("tree must be a FiniteTree")
        self.tree = tree
        self.labels = frozenset(labels)
        vals = []
        assign = dict(assign)
        for p in tree.nodes:
            v = frozenset(assign.pop(p, ()))
            extra = v - self.labels
            if extra:
                raise ValueError(
                    f"node {p}: labels {_sorted_labels(extra)} not in S"
                )
            vals.append(v)
        if assign:
            raise ValueError(f"assignments for unknown nodes {sorted(assign)}")
        self.assign = tuple(vals)

    def of(self, p):
        """Value on the branch at p (on the whole tree when p is the root)."""
        return self.assign[p]

    def __eq__(self, other):
        return (
            isinstance(other, Partition)
            and self.tree == other.tree
            and self.labels == other.labels
            and self.assign == other.assign
        )

    def __hash__(self):
        return hash((self.tree, self.labels, self.assign))

    def to_json(self):
        return {
            "tree": self.tree.to_json()["tree"],
            "S": _sorted_labels(self.labels),
            "pi": {
                str(p): _sorted_labels(self.assign[p])
                for p in self.tree.nodes
                if self.assign[p]
            },
        }

    @classmethod
    def from_json(cls, data):
        tree = FiniteTree(data["tree"])
        pi = data.get("pi", {})
        assign = {}
        for key, vals in pi.items():
            assign[int(key)] = [tuple(v) if isinstance(v, list) else v for v in vals]
        labels = [tuple(v) if isinstance(v, list) else v for v in data["S"]]
        return cls(tree, labels, assign)


def validate_partition(p):
    """Check the partition axioms; report the first violation with a witness.

    Returns {"valid": bool, "axiom": None|"functor"|1|2|3|4, "witness": ...}.
    The functor condition (values grow along branch inclusions) is checked
    before the numbered axioms since they presuppose it.

    At finite scale every node set is compact, so axioms 3 and 4 as stated
    cannot fail outright; their finite shadows are checked instead: axiom 3
    over the ball filtration (leftover labels at each depth form a finite,
    explicitly listed set) and axiom 4 as well-definedness of first exits
    (the branches carrying a given label form a single chain).
    """
    tree, S = p.tree, p.labels

    # functoriality on parent edges suffices: branches compose
    for q in tree.nodes:
        if q == tree.root:
            continue
        u = tree.parent[q]
        missing = p.of(q) - p.of(u)
        if missing:
            return {
                "valid": False,
                "axiom": "functor",
                "witness": {
                    "node": q,
                    "parent": u,
                    "labels": _sorted_labels(missing),
                },
            }

    # axiom 1: the whole tree carries all of S
    missing = S - p.of(tree.root)
    if missing:
        return {
            "valid": False,
            "axiom": 1,
            "witness": {"labels": _sorted_labels(missing)},
        }

    # axiom 2: incomparable branches carry disjoint sets
    for a in tree.nodes:
        for b in range(a + 1, tree.n):
            if tree.is_ancestor(a, b) or tree.is_ancestor(b, a):
                continue
            common = p.of(a) & p.of(b)
            if common:
                return {
                    "valid": False,
                    "axiom": 2,
                    "witness": {
                        "nodes": [a, b],
                        "labels": _sorted_labels(common),
                    },
                }

    # axiom 3, finite shadow: at each depth the labels not carried by any
    # branch rooted there form a finite set.  Finiteness is automatic on
    # finite data; the loop exists so the check is evaluated, not assumed.
    for d in range(tree.max_depth + 1):
        covered = set()
        for q in tree.nodes:
            if tree.depth[q] == d:
                covered |= p.of(q)
        leftover = S - covered
        if not isinstance(len(leftover), int):  # pragma: no cover
            return {"valid": False, "axiom": 3, "witness": {"depth": d}}

    # axiom 4, finite shadow: each label exits through a single chain of
    # branches, so its first exit is well defined.  Given axioms 1 and 2
    # this cannot fail; checked independently all the same.
    for s in _sorted_labels(S):
        carriers = [q for q in tree.nodes if s in p.of(q)]
        for a in carriers:
            for b in carriers:
                if a < b and not (tree.is_ancestor(a, b) or tree.is_ancestor(b, a)):
                    return {
                        "valid": False,
                        "axiom": 4,
                        "witness": {"label": s, "nodes": [a, b]},
                    }

    return {"valid": True, "axiom": None, "witness": None}


def standard_partition(tree):
    """Each branch carries its own vertex set; S is the node set."""
    return Partition(
        tree, tree.nodes, {q: tree.branch(q) for q in tree.nodes}
    )


def shifted_standard_partition(tree, k=1):
    """Vertices assigned to the branch of their depth-k ancestor.

    Equivalently each branch carries only its vertices at relative depth
    at least k.  Intersecting with the standard partition returns this
    partition again, which is the point of the example.
    """
    if k < 0:
        raise ValueError("shift must be nonnegative")
    assign = {}
    for q in tree.nodes:
        if q == tree.root:
            assign[q] = set(tree.nodes)
        else:
            d = tree.depth[q] + k
            assign[q] = {v for v in tree.branch(q) if tree.depth[v] >= d}
    return Partition(tree, tree.nodes, assign)


def padded_standard_partition(tree, copies):
    """Standard partition with labels (v, c) for c in 1..copies."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    labels = [(v, c) for v in tree.nodes for c in range(1, copies + 1)]
    assign = {
        q: {(v, c) for v in tree.branch(q) for c in range(1, copies + 1)}
        for q in tree.nodes
    }
    return Partition(tree, labels, assign)


def intersect_partitions(a, b):
    """Branchwise intersection of two partitions on the same tree and S.

    The result is validated before being returned; a failure (possible
    only when an input was already invalid) raises with the witness.
    Axioms 1, 2 and 4 survive intersection unconditionally; axiom 3 is
    the one the validation genuinely re-checks.
    """
    if a.tree != b.tree:
        raise ValueError("partitions live on different trees")
    if a.labels != b.labels:
        raise ValueError("partitions have different label sets")
    out = Partition(
        a.tree, a.labels, {q: a.of(q) & b.of(q) for q in a.tree.nodes}
    )
    report = validate_partition(out)
    if not report["valid"]:
        raise ValueError(
            f"intersection fails axiom {report['axiom']}: {report['witness']}"
        )
    return out


# ---------------------------------------------------------------------------
# stabilization: matching labels into padded copies of the vertex partition
# ---------------------------------------------------------------------------


def _first_exit(p, s):
    """Deepest node whose branch carries s; requires a valid partition."""
    tree = p.tree
    carriers = [q for q in tree.nodes if s in p.of(q)]
    carriers.sort(key=lambda q: (tree.depth[q], q))
    return carriers[-1] if carriers else tree.root


def _exit_blocks(p):
    """Block decomposition of V and S by first exit.

    Block q holds the vertex q itself plus every label whose deepest
    carrying branch is the one at q.  Vertices exit at their own branch
    since v sits in the vertex set of A_v and of nothing deeper.
    """
    blocks = {q: [("vertex", q)] for q in p.tree.nodes}
    for s in _sorted_labels(p.labels):
        blocks[_first_exit(p, s)].append(("label", s))
    return blocks


def required_copies(p):
    """Least number of vertex-partition copies whose capacity suffices.

    Every element assigned within a branch must land in that branch, so
    each branch A needs |A| + |labels on A| slots out of copies * |A|.
    """
    tree = p.tree
    need = 1
    for q in tree.nodes:
        size = len(tree.branch(q))
        total = size + len(p.of(q))
        need = max(need, -(-total // size))
    return need


def stabilize(p, copies=None):
    """Absorb the labels of a valid partition into padded vertex copies.

    Returns (alpha, certificate).  alpha maps every tagged element
    ("vertex", v) or ("label", s) injectively to a slot (w, c) with w a
    vertex and 1 <= c <= copies, preserving first-exit blocks: an element
    exiting at the branch A_q lands on a vertex of A_q.  Slot (q, 1) is
    always taken by the vertex q itself, so every exit block meets its
    base slot.

    The certificate carries the padded count, the induced partitions
    tau = alpha o (pi u rho) and lambda = tau n rho, their validation
    reports, and the branchwise inclusions that exhibit the equivalence
    with the padded standard partition.

    copies below the required minimum is a capacity error naming the
    minimum; the default uses exactly the minimum.
    """
    report = validate_partition(p)
    if not report["valid"]:
        raise ValueError(
            f"partition fails axiom {report['axiom']}: {report['witness']}"
        )
    tree = p.tree
    need = required_copies(p)
    n = need if copies is None else copies
    if n < need:
        raise ValueError(
            f"capacity exhausted at finite depth: {n} copies given, "
            f"{need} required"
        )

    blocks = _exit_blocks(p)
    used = set()
    alpha = {}
    # deepest blocks first: ancestors then fill leftover shallow capacity
    order = sorted(tree.nodes, key=lambda q: (-tree.depth[q], q))
    for q in order:
        members = blocks[q]
        base = (q, 1)
        assert base not in used
        alpha[("vertex", q)] = base
        used.add(base)
        rest = [m for m in members if m != ("vertex", q)]
        slots = (
            (w, c)
            for w in sorted(tree.branch(q))
            for c in range(1, n + 1)
        )
        free = iter([s for s in slots if s not in used])
        for m in rest:
            try:
                slot = next(free)
            except StopIteration:  # pragma: no cover
                raise RuntimeError("capacity bound violated internally")
            alpha[m] = slot
            used.add(slot)

    # tau(A) = alpha of everything assigned on A; lambda = tau n rho
    rho_n = padded_standard_partition(tree, n)
    image = frozenset(alpha.values())
    tau_assign = {}
    lam_assign = {}
    for q in tree.nodes:
        sigma = {("vertex", v) for v in tree.branch(q)}
        sigma |= {("label", s) for s in p.of(q)}
        tq = frozenset(alpha[m] for m in sigma)
        tau_assign[q] = tq
        lam_assign[q] = tq & rho_n.of(q)
    tau = Partition(tree, image, tau_assign)
    lam = Partition(tree, image, lam_assign)

    injective = len(set(alpha.values())) == len(alpha)
    hits = all((q, 1) in tau.of(q) for q in tree.nodes)
    preserving = all(
        alpha[m][0] in tree.branch(q)
        for q, members in blocks.items()
        for m in members
    )
    certificate = {
        "copies": n,
        "required_copies": need,
        "block_sizes": {q: len(blocks[q]) for q in tree.nodes},
        "injective": injective,
        "hits_every_block": hits,
        "block_preserving": preserving,
        "tau": tau.to_json(),
        "tau_report": validate_partition(tau),
        "lambda": lam.to_json(),
        "lambda_report": validate_partition(lam),
        "lambda_in_tau": all(
            lam.of(q) <= tau.of(q) for q in tree.nodes
        ),
        "lambda_in_rho": all(
            lam.of(q) <= rho_n.of(q) for q in tree.nodes
        ),
        "padding_surplus": n * tree.n - len(alpha),
    }
    return alpha, certificate


def brute_force_stabilize(p, copies):
    """Exhaustive search for a block-preserving injection into the padding.

    Returns an alpha dict or None.  Exponential; meant as an independent
    oracle for small instances, not for use at scale.
    """
    report = validate_partition(p)
    if not report["valid"]:
        raise ValueError("partition is not valid")
    tree = p.tree
    blocks = _exit_blocks(p)
    elems = []
    for q in sorted(tree.nodes, key=lambda q: (-tree.depth[q], q)):
        for m in blocks[q]:
            elems.append((m, q))

    allowed = {
        m: [
            (w, c)
            for w in sorted(tree.branch(q))
            for c in range(1, copies + 1)
        ]
        for m, q in elems
    }
    used = set()
    alpha = {}

    def place(i):
        if i == len(elems):
            return True
        m, _ = elems[i]
        for slot in allowed[m]:
            if slot in used:
                continue
            used.add(slot)
            alpha[m] = slot
            if place(i + 1):
                return True
            used.discard(slot)
            del alpha[m]
        return False

    return dict(alpha) if place(0) else None


# ---------------------------------------------------------------------------
# free modules on partitions
# ---------------------------------------------------------------------------


class FreeTreeModule:
    """Free module tower on a partition: basis over each branch.

    The basis attached to the branch at p is the label set the partition
    assigns there; branch inclusions act by the evident injections of
    bases.  The ring is one catalog group ring, constant over the tree.
    side records handedness so that duals land on the opposite side.
    """

    def __init__(self, partition, ring, side="left"):
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        self.partition = partition
        self.tree = partition.tree
        self.ring = ring
        self.side = side

    def rank(self, q):
        return len(self.partition.of(q))

    def basis(self, q):
        return _sorted_labels(self.partition.of(q))

    def dual(self):
        other = "right" if self.side == "left" else "left"
        return FreeTreeModule(self.partition, self.ring, other)

    def __eq__(self, other):
        return (
            isinstance(other, FreeTreeModule)
            and self.partition == other.partition
            and self.ring == other.ring
            and self.side == other.side
        )

    def __repr__(self):
        return (
            f"FreeTreeModule(nodes={self.tree.n}, "
            f"ring={self.ring.kind}, side={self.side})"
        )


def free_dual(m):
    """Opposite-sided dual with the same bases at every node.

    Free modules on a partition carry finitely supported coordinates, so
    dualizing keeps the basis and flips the side; applying it twice
    returns a module equal to the original, the identity on bases being
    the natural comparison.
    """
    return m.dual()


class TreeModuleMap:
    """Map of free tree modules: one matrix per node, rows over the target
    basis, columns over the source basis, compatible with the basis
    inclusions of both sides.

    Compatibility at a parent edge: the parent matrix, restricted to the
    columns of a child basis, must be supported on rows of the child
    basis and agree there with the child matrix.
    """

    def __init__(self, source, target, mats, check=True):
        if source.tree != target.tree:
            raise ValueError("source and target live on different trees")
        if source.ring != target.ring:
            raise ValueError("source and target have different rings")
        if source.side != target.side:
            raise ValueError("source and target have different sides")
        self.source = source
        self.target = target
        self.ring = source.ring
        mats = dict(mats)
        self.mats = {}
        for q in source.tree.nodes:
            A = mats.pop(q, None)
            r, c = target.rank(q), source.rank(q)
            if A is None:
                A = [[self.ring.zero()] * c for _ in range(r)]
            A = [list(row) for row in A]
            if len(A) != r or any(len(row) != c for row in A):
                raise ValueError(f"node {q}: matrix shape must be {r}x{c}")
            self.mats[q] = A
        if mats:
            raise ValueError(f"matrices for unknown nodes {sorted(mats)}")
        if check:
            self._check_compatibility()

    def _check_compatibility(self):
        tree = self.source.tree
        for q in tree.nodes:
            if q == tree.root:
                continue
            u = tree.parent[q]
            sb_q, sb_u = self.source.basis(q), self.source.basis(u)
            tb_q, tb_u = self.target.basis(q), self.target.basis(u)
            tq_pos = {y: i for i, y in enumerate(tb_q)}
            su_pos = {x: j for j, x in enumerate(sb_u)}
            tu_pos = {y: i for i, y in enumerate(tb_u)}
            for j, x in enumerate(sb_q):
                ju = su_pos[x]
                for i, y in enumerate(tb_u):
                    val = self.mats[u][i][ju]
                    if y in tq_pos:
                        if val != self.mats[q][tq_pos[y]][j]:
                            raise ValueError(
                                f"edge {u}->{q}: matrices disagree on "
                                f"basis element {x!r}"
                            )
                    elif not val.is_zero:
                        raise ValueError(
                            f"edge {u}->{q}: image of {x!r} leaves the "
                            f"child basis at row {y!r}"
                        )
            # target rows of the child must be present in the parent
            for y in tb_q:
                if y not in tu_pos:  # pragma: no cover
                    raise ValueError(f"edge {u}->{q}: bases not nested")
            for x in sb_q:
                if x not in su_pos:  # pragma: no cover
                    raise ValueError(f"edge {u}->{q}: bases not nested")

    @classmethod
    def identity(cls, module):
        mats = {}
        for q in module.tree.nodes:
            r = module.rank(q)
            mats[q] = [
                [module.ring.one() if i == j else module.ring.zero() for j in range(r)]
                for i in range(r)
            ]
        return cls(module, module, mats, check=False)

    def compose(self, other):
        """self o other, requiring other.target == self.source."""
        if other.target != self.source:
            raise ValueError("composition mismatch")
        mats = {}
        for q in self.source.tree.nodes:
            mats[q] = rmat_mul(
                self.ring,
                self.mats[q],
                other.mats[q],
                self.target.rank(q),
                self.source.rank(q),
                other.source.rank(q),
            )
        return TreeModuleMap(other.source, self.target, mats, check=False)

    def dual(self):
        """Contravariant dual: transposed, involuted matrices on the duals."""
        mats = {
            q: rmat_involve_transpose(
                self.mats[q], self.target.rank(q), self.source.rank(q)
            )
            for q in self.source.tree.nodes
        }
        return TreeModuleMap(self.target.dual(), self.source.dual(), mats)

    def __eq__(self, other):
        return (
            isinstance(other, TreeModuleMap)
            and self.source == other.source
            and self.target == other.target
            and self.mats == other.mats
        )


def germ_equal(f, g, k):
    """Equality of maps after discarding the top k levels of the tree.

    Map germs at infinity compare maps on deep branches only; at finite
    scale that is equality of the node matrices at depth k and below.
    """
    if f.source.tree != g.source.tree:
        raise ValueError("maps live on different trees")
    tree = f.source.tree
    for q in tree.nodes:
        if tree.depth[q] >= k and f.mats[q] != g.mats[q]:
            return False
    return True
