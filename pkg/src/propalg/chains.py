"""Based free chain complexes over the catalog rings.

A complex here is strictly finite: finitely many degrees, finite rank in
each.  Boundary matrices act on column vectors, so the matrix of
d_k : C_k -> C_{k-1} has rank(k-1) rows and rank(k) columns, and entry
(i, j) is the coefficient of the i-th basis element of C_{k-1} in the
image of the j-th basis element of C_k.
"""

from __future__ import annotations

from .coefficients import (
    FgAbelian,
    GroupRingElt,
    GroupSpec,
    _cols_to_mat,
    element_regular_rep,
    image_lattice_basis,
    kernel_basis,
    ring_solve_multi,
    rmat_add,
    rmat_eye,
    rmat_from_int,
    rmat_involve_transpose,
    rmat_is_zero,
    rmat_mul,
    rmat_neg,
    rmat_sub,
    rmat_zero,
    snf_solver,
    solve_int,
)


class BasedComplex:
    """Finite free chain complex with a preferred ordered basis per degree."""

    __slots__ = ("ring", "lo", "hi", "ranks", "boundaries", "labels")

    def __init__(self, ring: GroupSpec, ranks: dict, boundaries: dict, labels: dict | None = None):
        ranks = {int(k): int(v) for k, v in ranks.items() if v}
        if ranks:
            lo, hi = min(ranks), max(ranks)
        else:
            lo, hi = 0, -1
        bnd = {}
        for k in range(lo + 1, hi + 1):
            r, c = ranks.get(k - 1, 0), ranks.get(k, 0)
            M = boundaries.get(k)
            if M is None:
                M = rmat_zero(ring, r, c)
            if len(M) != r or (r and any(len(row) != c for row in M)):
                raise ValueError(f"boundary at degree {k} has the wrong shape")
            bnd[k] = M
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self.ranks = ranks
        self.boundaries = bnd
        self.labels = {} if labels is None else {int(k): list(v) for k, v in labels.items()}

    def rank(self, k: int) -> int:
        return self.ranks.get(k, 0)

    def boundary(self, k: int):
        """Matrix of d_k, with zero-rank shapes outside the stored range."""
        if k in self.boundaries:
            return self.boundaries[k]
        return rmat_zero(self.ring, self.rank(k - 1), self.rank(k))

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def label(self, k: int, i: int) -> str:
        lab = self.labels.get(k)
        return lab[i] if lab and i < len(lab) else f"e{k}.{i}"

    def euler(self) -> int:
        return sum((-1) ** k * r for k, r in self.ranks.items())

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def __repr__(self):
        rk = ", ".join(f"{k}:{self.rank(k)}" for k in self.degrees())
        return f"BasedComplex({self.ring!r}, ranks {{{rk}}})"

    def to_json(self):
        ranks = [self.rank(k) for k in self.degrees()]
        bnds = []
        for k in range(self.lo + 1, self.hi + 1):
            bnds.append([[x.to_json() for x in row] for row in self.boundary(k)])
        out = {"ring": self.ring.to_json(), "lo": self.lo, "ranks": ranks, "boundaries": bnds}
        if self.labels:
            out["labels"] = {str(k): v for k, v in self.labels.items()}
        return out

    @classmethod
    def from_json(cls, data) -> "BasedComplex":
        ring = GroupSpec.from_json(data["ring"])
        lo = int(data["lo"])
        ranks = {lo + i: r for i, r in enumerate(data["ranks"])}
        bnds = {}
        for i, M in enumerate(data.get("boundaries", [])):
            k = lo + i + 1
            bnds[k] = [[GroupRingElt.from_json(ring, x) for x in row] for row in M]
        labels = {int(k): v for k, v in (data.get("labels") or {}).items()}
        return cls(ring, ranks, bnds, labels)


def complex_from_int(ring: GroupSpec, ranks: dict, boundaries: dict, labels=None) -> BasedComplex:
    bnd = {k: rmat_from_int(ring, M) for k, M in boundaries.items()}
    return BasedComplex(ring, ranks, bnd, labels)


def validate_complex(C: BasedComplex):
    """Check d∘d = 0 everywhere; the report names the first bad entry."""
    for k in range(C.lo + 2, C.hi + 1):
        P = rmat_mul(C.ring, C.boundary(k - 1), C.boundary(k), C.rank(k - 2), C.rank(k - 1), C.rank(k))
        for i in range(C.rank(k - 2)):
            for j in range(C.rank(k)):
                if not P[i][j].is_zero:
                    return {
                        "valid": False,
                        "degree": k,
                        "entry": (i, j),
                        "value": P[i][j],
                        "message": f"d_{k-1} d_{k} has nonzero entry {P[i][j]!r} at ({i}, {j})",
                    }
    return {"valid": True}


class ChainMap:
    """Degree-zero map of complexes; components checked against boundaries."""

    __slots__ = ("source", "target", "mats")

    def __init__(self, source: BasedComplex, target: BasedComplex, mats: dict, check: bool = True):
        if source.ring != target.ring:
            raise ValueError("chain maps need a common ring")
        self.source = source
        self.target = target
        self.mats = {}
        for k in range(min(source.lo, target.lo), max(source.hi, target.hi) + 1):
            r, c = target.rank(k), source.rank(k)
            M = mats.get(k)
            if M is None:
                M = rmat_zero(source.ring, r, c)
            if len(M) != r or (r and any(len(row) != c for row in M)):
                raise ValueError(f"component at degree {k} has the wrong shape")
            self.mats[k] = M
        if check and not self.commutes():
            raise ValueError("components do not commute with the boundaries")

    def mat(self, k: int):
        if k in self.mats:
            return self.mats[k]
        return rmat_zero(self.source.ring, self.target.rank(k), self.source.rank(k))

    def commutes(self) -> bool:
        ring = self.source.ring
        for k in range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1):
            left = rmat_mul(ring, self.target.boundary(k), self.mat(k),
                            self.target.rank(k - 1), self.target.rank(k), self.source.rank(k))
            right = rmat_mul(ring, self.mat(k - 1), self.source.boundary(k),
                             self.target.rank(k - 1), self.source.rank(k - 1), self.source.rank(k))
            if not rmat_is_zero(rmat_sub(left, right)):
                return False
        return True

    @classmethod
    def identity(cls, C: BasedComplex) -> "ChainMap":
        return cls(C, C, {k: rmat_eye(C.ring, C.rank(k)) for k in C.degrees()}, check=False)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self after other."""
        if other.target is not self.source and other.target.ranks != self.source.ranks:
            raise ValueError("composition shape mismatch")
        ring = self.source.ring
        mats = {}
        for k in range(other.source.lo, other.source.hi + 1):
            mats[k] = rmat_mul(ring, self.mat(k), other.mat(k),
                               self.target.rank(k), self.source.rank(k), other.source.rank(k))
        return ChainMap(other.source, self.target, mats, check=False)


class ChainHomotopy:
    """Degree +1 operator; D_k maps degree k into degree k+1."""

    __slots__ = ("source", "target", "mats")

    def __init__(self, source: BasedComplex, target: BasedComplex, mats: dict):
        self.source = source
        self.target = target
        self.mats = dict(mats)

    def mat(self, k: int):
        if k in self.mats:
            return self.mats[k]
        return rmat_zero(self.source.ring, self.target.rank(k + 1), self.source.rank(k))


def is_contraction_through(C: BasedComplex, H: ChainHomotopy, n: int) -> bool:
    """Does D d + d D = id hold in every degree r <= n."""
    ring = C.ring
    for r in range(C.lo, min(n, C.hi) + 1):
        a = rmat_mul(ring, C.boundary(r + 1), H.mat(r), C.rank(r), C.rank(r + 1), C.rank(r))
        b = rmat_mul(ring, H.mat(r - 1), C.boundary(r), C.rank(r), C.rank(r - 1), C.rank(r))
        if not rmat_is_zero(rmat_sub(rmat_add(a, b), rmat_eye(ring, C.rank(r)))):
            return False
    return True


def find_contraction(C: BasedComplex, n: int) -> ChainHomotopy | None:
    """Search for a chain contraction valid through degree n.

    Built degreewise by solving d_{r+1} D_r = id - D_{r-1} d_r.  Over the
    Laurent ring the solve runs inside a finite coefficient window sized
    from the boundary support and the length of the complex, widened once
    on failure; a miss is reported as absence, which is only a statement
    about the searched window.
    """
    ring = C.ring
    n = min(n, C.hi)
    spread = 0
    for k in range(C.lo + 1, C.hi + 1):
        for row in C.boundary(k):
            for x in row:
                for e in x.terms():
                    spread = max(spread, abs(e))
    base = spread * (C.hi - C.lo + 1) + 2
    for window in (base, 2 * base):
        mats = {}
        ok = True
        prev = None
        for r in range(C.lo, n + 1):
            rhs = rmat_eye(ring, C.rank(r))
            if prev is not None:
                rhs = rmat_sub(rhs, rmat_mul(ring, prev, C.boundary(r),
                                             C.rank(r), C.rank(r - 1), C.rank(r)))
            if C.rank(r + 1) == 0:
                if not rmat_is_zero(rhs):
                    ok = False
                    break
                D = rmat_zero(ring, 0, C.rank(r))
            else:
                D = ring_solve_multi(ring, (C.rank(r + 1), C.rank(r)),
                                     [(C.boundary(r + 1), None, rhs)], window=window)
                if D is None:
                    ok = False
                    break
            mats[r] = D
            prev = D
        if ok:
            H = ChainHomotopy(C, C, mats)
            if is_contraction_through(C, H, n):
                return H
        if ring.kind != "infinite-cyclic":
            break
    return None


# ---------------------------------------------------------------------------
# homology over the integers
# ---------------------------------------------------------------------------


def _int_matrix(C: BasedComplex, k: int):
    return [[x.coeff(0) for x in row] for row in C.boundary(k)]


def homology_Z(C: BasedComplex) -> dict:
    """Integral homology per degree, as finitely generated abelian groups.

    The ring must be trivial; push other rings down with change_of_rings
    first.
    """
    if C.ring.kind != "trivial":
        raise ValueError("homology_Z wants the trivial ring; apply change_of_rings first")
    out = {}
    for k in C.degrees():
        out[k] = _homology_at(C, k)
    return out


def _homology_at(C: BasedComplex, k: int) -> FgAbelian:
    dk = _int_matrix(C, k)
    dk1 = _int_matrix(C, k + 1)
    Kb = kernel_basis(dk, C.rank(k - 1), C.rank(k))
    K = _cols_to_mat(Kb, C.rank(k))
    rels = []
    for v in image_lattice_basis(dk1, C.rank(k), C.rank(k + 1)):
        coord = solve_int(K, v, C.rank(k), len(Kb))
        if coord is None:
            raise RuntimeError("boundary image escaped the cycle lattice")
        rels.append(coord)
    return FgAbelian(len(Kb), _cols_to_mat(rels, len(Kb)), len(rels))


def _subquotient_presentation(out_mat, in_mat, dim, out_rows, in_cols):
    # ker(out_mat) / im(in_mat) inside Z^dim, keeping the kernel basis and
    # a coordinate solver around for induced-map computations
    Kb = kernel_basis(out_mat, out_rows, dim)
    K = _cols_to_mat(Kb, dim)
    solver = snf_solver(K, dim, len(Kb))
    rels = []
    for v in image_lattice_basis(in_mat, dim, in_cols):
        coord = solver(v)
        if coord is None:
            raise RuntimeError("image escaped the kernel lattice")
        rels.append(coord)
    G = FgAbelian(len(Kb), _cols_to_mat(rels, len(Kb)), len(rels))
    return G, K, solver


def homology_presentation(C: BasedComplex, k: int):
    """Homology at one degree, presented on a basis of the cycle lattice.

    Returns (group, cycles, solver): columns of the cycles matrix are the
    lattice basis, and solver takes a degree-k vector to its coordinates
    in that basis (None when the vector is not a cycle).  Generator j of
    the group is the class of column j, so induced maps on homology can
    be assembled by pushing basis cycles through a chain map and solving.
    """
    if C.ring.kind != "trivial":
        raise ValueError("homology presentations want the trivial ring")
    return _subquotient_presentation(
        _int_matrix(C, k), _int_matrix(C, k + 1), C.rank(k), C.rank(k - 1), C.rank(k + 1))


def cohomology_presentation(C: BasedComplex, k: int):
    """Cohomology at one degree, presented on a basis of the cocycle lattice.

    Same contract as homology_presentation with arrows reversed: the
    returned vectors are cochain values on the degree-k basis.
    """
    if C.ring.kind != "trivial":
        raise ValueError("cohomology presentations want the trivial ring")

    def t(mat, r, c):
        return [[mat[i][j] for i in range(r)] for j in range(c)] if r and c else \
            [[0] * r for _ in range(c)]

    dq1 = _int_matrix(C, k + 1)
    dq = _int_matrix(C, k)
    delta_out = t(dq1, C.rank(k), C.rank(k + 1))
    delta_in = t(dq, C.rank(k - 1), C.rank(k))
    return _subquotient_presentation(delta_out, delta_in, C.rank(k), C.rank(k + 1), C.rank(k - 1))


def change_of_rings(C: BasedComplex, target: str) -> BasedComplex:
    """Push the complex to the integers along a catalog ring morphism.

    target is "augmentation" (sum of coefficients), "character" (the
    orientation character), or "regular" (the regular embedding of a
    finite cyclic group ring, multiplying every rank by n).
    """
    Z = GroupSpec("trivial")
    if target == "augmentation":
        bnd = {k: [[x.augmentation() for x in row] for row in C.boundary(k)]
               for k in range(C.lo + 1, C.hi + 1)}
        return complex_from_int(Z, dict(C.ranks), bnd, dict(C.labels))
    if target == "character":
        bnd = {k: [[x.character_value() for x in row] for row in C.boundary(k)]
               for k in range(C.lo + 1, C.hi + 1)}
        return complex_from_int(Z, dict(C.ranks), bnd, dict(C.labels))
    if target == "regular":
        if C.ring.kind != "cyclic":
            raise ValueError("regular embedding wants a finite cyclic ring")
        n = C.ring.n
        ranks = {k: n * r for k, r in C.ranks.items()}
        bnd = {}
        for k in range(C.lo + 1, C.hi + 1):
            M = C.boundary(k)
            big = [[0] * (n * C.rank(k)) for _ in range(n * C.rank(k - 1))]
            for i in range(C.rank(k - 1)):
                for j in range(C.rank(k)):
                    blk = element_regular_rep(M[i][j])
                    for a in range(n):
                        for b in range(n):
                            big[n * i + a][n * j + b] = blk[a][b]
            bnd[k] = big
        return complex_from_int(Z, ranks, bnd)
    raise ValueError(f"unsupported ring morphism {target!r}")


# ---------------------------------------------------------------------------
# duals, sums, cones, tensor products
# ---------------------------------------------------------------------------


def dual_complex(C: BasedComplex, m: int) -> BasedComplex:
    """The m-twisted functional dual: degree k holds the dual of C_{m-k}.

    Entries pass through the orientation-twisted involution, matrices are
    transposed, and the boundary in degree k carries the sign (-1)^(k+m).
    The double dual has the same bases and matrices up to the global
    chain isomorphism that is the identity when m is odd and alternates
    signs by degree when m is even.
    """
    ranks = {m - k: r for k, r in C.ranks.items()}
    bnd = {}
    labels = {m - k: [f"{lab}^" for lab in C.labels[k]] for k in C.labels}
    for k in range(m - C.hi + 1, m - C.lo + 1):
        src = C.boundary(m - k + 1)
        M = rmat_involve_transpose(src, C.rank(m - k), C.rank(m - k + 1))
        if (k + m) % 2:
            M = rmat_neg(M)
        bnd[k] = M
    return BasedComplex(C.ring, ranks, bnd, labels)


def direct_sum(C: BasedComplex, D: BasedComplex) -> BasedComplex:
    if C.ring != D.ring:
        raise ValueError("ring mismatch")
    ring = C.ring
    ranks = {}
    for k in set(C.ranks) | set(D.ranks):
        ranks[k] = C.rank(k) + D.rank(k)
    bnd = {}
    lo = min(ranks) if ranks else 0
    hi = max(ranks) if ranks else -1
    for k in range(lo + 1, hi + 1):
        r, c = C.rank(k - 1) + D.rank(k - 1), C.rank(k) + D.rank(k)
        M = rmat_zero(ring, r, c)
        A, B = C.boundary(k), D.boundary(k)
        for i in range(C.rank(k - 1)):
            for j in range(C.rank(k)):
                M[i][j] = A[i][j]
        for i in range(D.rank(k - 1)):
            for j in range(D.rank(k)):
                M[C.rank(k - 1) + i][C.rank(k) + j] = B[i][j]
        bnd[k] = M
    labels = {}
    for k in set(C.labels) | set(D.labels) | set(ranks):
        labels[k] = [C.label(k, i) for i in range(C.rank(k))] + [D.label(k, i) for i in range(D.rank(k))]
    return BasedComplex(ring, ranks, bnd, labels)


def cone(f: ChainMap) -> BasedComplex:
    """Mapping cone: degree n holds source_{n-1} and target_n.

    d(a, b) = (-d a, d b - f a), which squares to zero exactly because f
    is a chain map.
    """
    A, B = f.source, f.target
    ring = A.ring
    ranks = {}
    for k in range(min(A.lo + 1, B.lo), max(A.hi + 1, B.hi) + 1):
        r = A.rank(k - 1) + B.rank(k)
        if r:
            ranks[k] = r
    bnd = {}
    lo = min(ranks) if ranks else 0
    hi = max(ranks) if ranks else -1
    for k in range(lo + 1, hi + 1):
        rows = A.rank(k - 2) + B.rank(k - 1)
        cols = A.rank(k - 1) + B.rank(k)
        M = rmat_zero(ring, rows, cols)
        dA = A.boundary(k - 1)
        for i in range(A.rank(k - 2)):
            for j in range(A.rank(k - 1)):
                M[i][j] = -dA[i][j]
        F = f.mat(k - 1)
        for i in range(B.rank(k - 1)):
            for j in range(A.rank(k - 1)):
                M[A.rank(k - 2) + i][j] = -F[i][j]
        dB = B.boundary(k)
        for i in range(B.rank(k - 1)):
            for j in range(B.rank(k)):
                M[A.rank(k - 2) + i][A.rank(k - 1) + j] = dB[i][j]
        bnd[k] = M
    labels = {}
    for k in ranks:
        labels[k] = [f"a.{A.label(k - 1, i)}" for i in range(A.rank(k - 1))] + \
                    [f"b.{B.label(k, i)}" for i in range(B.rank(k))]
    return BasedComplex(ring, ranks, bnd, labels)


def tensor(C: BasedComplex, D: BasedComplex) -> BasedComplex:
    """Tensor product over the integers; D must live over the trivial ring.

    Basis of (C (x) D)_n: pairs (p-basis of C, q-basis of D) with p+q = n,
    ordered by ascending p then lexicographically.  The boundary follows
    d(x (x) y) = dx (x) y + (-1)^p x (x) dy.
    """
    if D.ring.kind != "trivial":
        raise ValueError("tensor factor D must be an integer complex")
    ring = C.ring

    def tensor_basis(n):
        out = []
        for p in range(C.lo, C.hi + 1):
            q = n - p
            if C.rank(p) and D.rank(q):
                for i in range(C.rank(p)):
                    for j in range(D.rank(q)):
                        out.append((p, i, j))
        return out

    lo, hi = C.lo + D.lo, C.hi + D.hi
    bases = {n: tensor_basis(n) for n in range(lo, hi + 1)}
    ranks = {n: len(b) for n, b in bases.items() if b}
    bnd = {}
    for n in range(lo + 1, hi + 1):
        src, dst = bases[n], bases[n - 1]
        index = {key: i for i, key in enumerate(dst)}
        M = rmat_zero(ring, len(dst), len(src))
        for col, (p, i, j) in enumerate(src):
            q = n - p
            dC = C.boundary(p)
            for i2 in range(C.rank(p - 1)):
                x = dC[i2][i]
                if not x.is_zero:
                    row = index[(p - 1, i2, j)]
                    M[row][col] = M[row][col] + x
            dD = D.boundary(q)
            sgn = -1 if p % 2 else 1
            for j2 in range(D.rank(q - 1)):
                y = dD[j2][j].coeff(0)
                if y:
                    row = index[(p, i, j2)]
                    M[row][col] = M[row][col] + ring.monomial(0, sgn * y)
        bnd[n] = M
    labels = {n: [f"{C.label(p, i)}*{D.label(n - p, j)}" for (p, i, j) in b]
              for n, b in bases.items() if b}
    return BasedComplex(ring, ranks, bnd, labels)
