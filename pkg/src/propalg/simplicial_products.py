"""Finite ordered simplicial pairs with rank-1 local systems and products.

Vertices are integers 0..n-1 and every simplex is a strictly increasing
tuple, so each simplex carries one preferred ordering.  Local coefficients
are twisted integers: a +-1 character on edges whose product around every
triangle is +1.  Chain and cochain coefficients attach at the leading
vertex of the simplex; moving a value along an edge multiplies by the
character.

Products use the staircase triangulation of the ordered product, with the
front-face/back-face (Alexander-Whitney) diagonal.  All product identities
used downstream hold exactly at the chain level, not just up to homotopy:

    d(u cap z) = (-1)^(|z|-|u|) (du) cap z + u cap dz
    cap = slant after the diagonal
    (u cup v) cap z = u cap (v cap z)
"""

from __future__ import annotations

from itertools import combinations

from .chains import BasedComplex, ChainMap, homology_Z
from .coefficients import (
    FgAbelian,
    GroupSpec,
    _cols_to_mat,
    image_lattice_basis,
    kernel_basis,
    rmat_from_int,
    solve_int,
)

Z = GroupSpec("trivial")


def _closure(simplices):
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


class SimplicialSpace:
    """Finite simplicial pair with an optional +-1 edge character."""

    def __init__(self, n: int, simplices, sub=(), character=None):
        self.n = n
        self.simplices = frozenset(tuple(sorted(s)) for s in simplices)
        self.sub = frozenset(tuple(sorted(s)) for s in sub)
        self.character = {}
        for key, val in (character or {}).items():
            a, b = key
            if val not in (1, -1):
                raise ValueError("character values must be +-1")
            if val == -1:
                self.character[(min(a, b), max(a, b))] = -1
        self._bydim = {}
        for s in self.simplices:
            self._bydim.setdefault(len(s) - 1, []).append(s)
        for q in self._bydim:
            self._bydim[q].sort()
        self._index = {q: {s: i for i, s in enumerate(lst)} for q, lst in self._bydim.items()}
        self.validate()

    def validate(self):
        for s in self.simplices:
            if any(v < 0 or v >= self.n for v in s):
                raise ValueError(f"vertex out of range in {s}")
            if len(set(s)) != len(s):
                raise ValueError(f"repeated vertex in {s}")
            for f in _closure([s]):
                if f not in self.simplices:
                    raise ValueError(f"face {f} of {s} missing: not closed under faces")
        for s in self.sub:
            if s not in self.simplices:
                raise ValueError(f"subcomplex simplex {s} not in the space")
            for f in _closure([s]):
                if f not in self.sub:
                    raise ValueError(f"subcomplex not closed under faces at {f}")
        for t in self.simplices_of(2):
            a, b, c = t
            if self.w(a, b) * self.w(b, c) * self.w(a, c) != 1:
                raise ValueError(f"character is not a cocycle on triangle {t}")

    def w(self, a: int, b: int) -> int:
        """Character on the edge between a and b (symmetric; 1 off-list)."""
        if a == b:
            return 1
        return self.character.get((min(a, b), max(a, b)), 1)

    def transport(self, a: int, b: int, twisted: bool) -> int:
        return self.w(a, b) if twisted else 1

    def dim(self) -> int:
        return max(self._bydim) if self._bydim else -1

    def simplices_of(self, q: int):
        return self._bydim.get(q, [])

    def index(self, s) -> int:
        return self._index[len(s) - 1][s]

    def untwisted(self) -> "SimplicialSpace":
        return SimplicialSpace(self.n, self.simplices, self.sub)

    def with_character(self, character) -> "SimplicialSpace":
        return SimplicialSpace(self.n, self.simplices, self.sub, character)

    def key(self):
        return (self.n, self.simplices, self.sub, tuple(sorted(self.character.items())))

    def __eq__(self, other):
        return isinstance(other, SimplicialSpace) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self):
        out = {"vertices": self.n, "simplices": sorted(map(list, self.simplices))}
        if self.sub:
            out["subcomplex"] = sorted(map(list, self.sub))
        if self.character:
            out["character"] = [[a, b, v] for (a, b), v in sorted(self.character.items())]
        return out

    @classmethod
    def from_json(cls, data) -> "SimplicialSpace":
        char = {(a, b): v for a, b, v in data.get("character", [])}
        return cls(data["vertices"], map(tuple, data["simplices"]),
                   map(tuple, data.get("subcomplex", [])), char)


def make_space(n, maximal, sub_maximal=(), character=None) -> SimplicialSpace:
    """Build a space from maximal simplices, closing under faces."""
    return SimplicialSpace(n, _closure(maximal), _closure(sub_maximal), character)


class Chain:
    """Simplicial chain; twisted means coefficients live in the character system."""

    def __init__(self, space: SimplicialSpace, degree: int, coeffs=None, twisted: bool = False):
        self.space = space
        self.degree = degree
        self.twisted = twisted
        self.coeffs = {}
        for s, c in (coeffs or {}).items():
            s = tuple(s)
            if len(s) != degree + 1:
                raise ValueError(f"{s} is not a {degree}-simplex")
            if s not in space.simplices:
                raise ValueError(f"{s} is not in the space")
            if c:
                self.coeffs[s] = self.coeffs.get(s, 0) + c
        self.coeffs = {s: c for s, c in self.coeffs.items() if c}

    def _like(self, coeffs):
        return Chain(self.space, self.degree, coeffs, self.twisted)

    def __add__(self, other):
        assert other.space == self.space and other.degree == self.degree and other.twisted == self.twisted
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return self._like(out)

    def __neg__(self):
        return self._like({s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int):
        return self._like({s: k * c for s, c in self.coeffs.items()})

    def boundary(self) -> "Chain":
        if self.degree <= 0:
            return Chain(self.space, self.degree - 1, {}, self.twisted)
        out = {}
        sp = self.space
        for s, c in self.coeffs.items():
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                if i == 0:
                    val = c * sp.transport(s[0], s[1], self.twisted)
                else:
                    val = c * (-1) ** i
                out[face] = out.get(face, 0) + val
        return Chain(self.space, self.degree - 1, out, self.twisted)

    def is_cycle(self) -> bool:
        return self.degree == 0 or not self.boundary().coeffs

    def vector(self):
        basis = self.space.simplices_of(self.degree)
        return [self.coeffs.get(s, 0) for s in basis]

    @classmethod
    def from_vector(cls, space, degree, vec, twisted=False):
        basis = space.simplices_of(degree)
        return cls(space, degree, dict(zip(basis, vec)), twisted)

    def __eq__(self, other):
        return (isinstance(other, Chain) and self.space == other.space
                and self.degree == other.degree and self.twisted == other.twisted
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return f"Chain(deg {self.degree}, {self.coeffs})"


class Cochain:
    """Simplicial cochain; values read at the leading vertex of each simplex."""

    def __init__(self, space: SimplicialSpace, degree: int, values=None, twisted: bool = False):
        self.space = space
        self.degree = degree
        self.twisted = twisted
        self.values = {}
        for s, c in (values or {}).items():
            s = tuple(s)
            if len(s) != degree + 1 or s not in space.simplices:
                raise ValueError(f"{s} is not a {degree}-simplex of the space")
            if c:
                self.values[s] = c

    def __call__(self, s) -> int:
        return self.values.get(tuple(s), 0)

    def _like(self, values):
        return Cochain(self.space, self.degree, values, self.twisted)

    def __add__(self, other):
        assert other.space == self.space and other.degree == self.degree and other.twisted == self.twisted
        out = dict(self.values)
        for s, c in other.values.items():
            out[s] = out.get(s, 0) + c
        return self._like(out)

    def __neg__(self):
        return self._like({s: -c for s, c in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int):
        return self._like({s: k * c for s, c in self.values.items()})

    def coboundary(self) -> "Cochain":
        sp = self.space
        out = {}
        for s in sp.simplices_of(self.degree + 1):
            total = 0
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                v = self.values.get(face, 0)
                if not v:
                    continue
                if i == 0:
                    total += sp.transport(s[0], s[1], self.twisted) * v
                else:
                    total += (-1) ** i * v
            if total:
                out[s] = total
        return Cochain(sp, self.degree + 1, out, self.twisted)

    def is_cocycle(self) -> bool:
        return not self.coboundary().values

    def eval_chain(self, z: Chain) -> int:
        """Kronecker pairing with a chain of the same degree and twist budget.

        Transported values multiply at each leading vertex; for twisted
        against twisted the product system is trivial so the sum is an
        honest integer.
        """
        return sum(c * self.values.get(s, 0) for s, c in z.coeffs.items())

    def vector(self):
        basis = self.space.simplices_of(self.degree)
        return [self.values.get(s, 0) for s in basis]

    @classmethod
    def from_vector(cls, space, degree, vec, twisted=False):
        basis = space.simplices_of(degree)
        return cls(space, degree, dict(zip(basis, vec)), twisted)

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.space == other.space
                and self.degree == other.degree and self.twisted == other.twisted
                and self.values == other.values)

    def __repr__(self):
        return f"Cochain(deg {self.degree}, {self.values})"


def augmentation_cocycle(space: SimplicialSpace) -> Cochain:
    return Cochain(space, 0, {s: 1 for s in space.simplices_of(0)})


# ---------------------------------------------------------------------------
# chain complexes of spaces and pairs
# ---------------------------------------------------------------------------


def boundary_complex(K: SimplicialSpace, twisted: bool = False, rel: bool = False) -> BasedComplex:
    """Chain complex of the space (or of the pair, when rel is set).

    With twisted set, boundary entries pick up the character on the
    leading edge, matching Chain.boundary.
    """
    def keep(s):
        return not (rel and s in K.sub)

    bases = {}
    for q in range(0, K.dim() + 1):
        lst = [s for s in K.simplices_of(q) if keep(s)]
        if lst:
            bases[q] = lst
    ranks = {q: len(lst) for q, lst in bases.items()}
    bnd = {}
    for q in sorted(bases):
        if q - 1 not in bases and q != 0:
            continue
        if q == 0:
            continue
        rows = {s: i for i, s in enumerate(bases.get(q - 1, []))}
        M = [[Z.zero()] * len(bases[q]) for _ in range(len(bases.get(q - 1, [])))]
        for j, s in enumerate(bases[q]):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                if face not in rows:
                    continue
                val = K.transport(s[0], s[1], twisted) if i == 0 else (-1) ** i
                M[rows[face]][j] = M[rows[face]][j] + Z.monomial(0, val)
        bnd[q] = M
    labels = {q: ["".join(str(v) for v in s) if K.n <= 10 else str(s) for s in lst]
              for q, lst in bases.items()}
    return BasedComplex(Z, ranks, bnd, labels)


def space_homology(K: SimplicialSpace, twisted: bool = False, rel: bool = False) -> dict:
    return homology_Z(boundary_complex(K, twisted=twisted, rel=rel))


def space_cohomology(K: SimplicialSpace, twisted: bool = False, rel: bool = False) -> dict:
    """Cohomology per degree, computed from the dualized chain complex."""
    from .chains import dual_complex
    C = boundary_complex(K, twisted=twisted, rel=rel)
    m = C.hi
    h = homology_Z(dual_complex(C, m))
    return {m - k: g for k, g in h.items()}


def _class_of(vec, dmat, dmat_next, nrows, ncols, ncols_next):
    # class of a cycle/cocycle vector in ker(dmat)/im(dmat_next)
    Kb = kernel_basis(dmat, nrows, ncols)
    Kmat = _cols_to_mat(Kb, ncols)
    rels = []
    for v in image_lattice_basis(dmat_next, ncols, ncols_next):
        coord = solve_int(Kmat, v, ncols, len(Kb))
        if coord is None:
            raise RuntimeError("image escaped the kernel lattice")
        rels.append(coord)
    G = FgAbelian(len(Kb), _cols_to_mat(rels, len(Kb)), len(rels))
    coord = solve_int(Kmat, vec, ncols, len(Kb))
    if coord is None:
        raise ValueError("the given element is not a cycle")
    return G, G.canon(coord)


def _int_mat(C: BasedComplex, k: int):
    return [[x.coeff(0) for x in row] for row in C.boundary(k)]


def cycle_class(z: Chain, rel: bool = False):
    """Homology group and canonical coordinates of a cycle's class."""
    C = boundary_complex(z.space, twisted=z.twisted, rel=rel)
    q = z.degree
    return _class_of(z.vector(), _int_mat(C, q), _int_mat(C, q + 1),
                     C.rank(q - 1), C.rank(q), C.rank(q + 1))


def cocycle_class(u: Cochain, rel: bool = False):
    """Cohomology group and canonical coordinates of a cocycle's class."""
    C = boundary_complex(u.space, twisted=u.twisted, rel=rel)
    q = u.degree
    # coboundary matrices are transposes of the boundary matrices
    dq = [list(col) for col in zip(*_int_mat(C, q + 1))] if C.rank(q + 1) else []
    dprev = [list(col) for col in zip(*_int_mat(C, q))] if C.rank(q) else []
    # fix shapes for empty cases
    if not dq:
        dq = [[0] * C.rank(q) for _ in range(C.rank(q + 1))] if C.rank(q + 1) else []
    if not dprev:
        dprev = [[0] * C.rank(q - 1) for _ in range(C.rank(q))] if C.rank(q) else []
    return _class_of(u.vector(), dq, dprev, C.rank(q + 1), C.rank(q), C.rank(q - 1))


# ---------------------------------------------------------------------------
# cup, cap
# ---------------------------------------------------------------------------


def cup(u: Cochain, v: Cochain) -> Cochain:
    """Front-face/back-face product; strictly associative."""
    if u.space != v.space:
        raise ValueError("cup wants cochains on one space")
    sp = u.space
    p, q = u.degree, v.degree
    out = {}
    for s in sp.simplices_of(p + q):
        a = u.values.get(s[: p + 1], 0)
        if not a:
            continue
        b = v.values.get(s[p:], 0)
        if not b:
            continue
        t = sp.transport(s[0], s[p], v.twisted)
        val = a * t * b
        if val:
            out[s] = val
    return Cochain(sp, p + q, out, u.twisted != v.twisted)


def cap(u: Cochain, z: Chain) -> Chain:
    """Evaluate u on the back face, keep the front face.

    Satisfies d(u cap z) = (-1)^(|z|-|u|) (du) cap z + u cap dz on the
    nose, in the twisted cases as well.
    """
    if u.space != z.space:
        raise ValueError("cap wants a cochain and a chain on one space")
    if u.degree > z.degree:
        raise ValueError("cap needs |u| <= |z|")
    sp = u.space
    p = u.degree
    n = z.degree
    q = n - p
    out = {}
    for s, c in z.coeffs.items():
        a = u.values.get(s[q:], 0)
        if not a:
            continue
        t = sp.transport(s[0], s[q], u.twisted)
        front = s[: q + 1]
        out[front] = out.get(front, 0) + c * t * a
    return Chain(sp, q, out, u.twisted != z.twisted)


# ---------------------------------------------------------------------------
# products of spaces, cross, slant, diagonal
# ---------------------------------------------------------------------------

_product_cache = {}


def product_space(X: SimplicialSpace, Y: SimplicialSpace) -> SimplicialSpace:
    """Staircase triangulation of the product, vertices x*nY + y.

    Simplices are the strictly increasing chains in the componentwise
    order on sigma x tau over simplices sigma of X, tau of Y.  The result
    remembers its factors for slant and friends.
    """
    ck = (X.key(), Y.key())
    if ck in _product_cache:
        return _product_cache[ck]
    nY = Y.n

    def enc(a, b):
        return a * nY + b

    simplices = set()
    for s in X.simplices:
        for t in Y.simplices:
            grid = [(a, b) for a in s for b in t]
            # chains in the grid: DFS over componentwise-monotone paths
            def extend(chain, rest):
                simplices.add(tuple(enc(a, b) for a, b in chain))
                last = chain[-1]
                for p in rest:
                    if p > last and p[0] >= last[0] and p[1] >= last[1]:
                        extend(chain + [p], [x for x in rest if x != p])
            for start in grid:
                extend([start], [p for p in grid if p != start])
    char = {}
    for sxy in simplices:
        if len(sxy) == 2:
            (a1, b1), (a2, b2) = divmod(sxy[0], nY), divmod(sxy[1], nY)
            val = X.w(a1, a2) * Y.w(b1, b2)
            if val == -1:
                char[(sxy[0], sxy[1])] = -1
    P = SimplicialSpace(X.n * Y.n, simplices, character=char)
    P.product_of = (X, Y)
    _product_cache[ck] = P
    return P


def _decode(P, v):
    X, Y = P.product_of
    return divmod(v, Y.n)


def _shuffle_sign(steps):
    # steps: sequence of 0 (advance in X) and 1 (advance in Y); the sign is
    # the parity of pairs where a Y-step precedes an X-step
    inv = 0
    ones = 0
    for s in steps:
        if s == 1:
            ones += 1
        else:
            inv += ones
    return -1 if inv % 2 else 1


def cross_product(c: Chain, d: Chain) -> Chain:
    """Shuffle (staircase) product chain on the product space."""
    if c.twisted or d.twisted:
        raise ValueError("cross products are supported for untwisted chains only")
    X, Y = c.space, d.space
    P = product_space(X, Y)
    nY = Y.n
    out = {}
    for s, a in c.coeffs.items():
        for t, b in d.coeffs.items():
            p, q = len(s) - 1, len(t) - 1
            # enumerate interleavings of p X-steps and q Y-steps
            for positions in combinations(range(p + q), p):
                steps = [1] * (p + q)
                for pos in positions:
                    steps[pos] = 0
                sign = _shuffle_sign(steps)
                ai, bi = 0, 0
                verts = [s[0] * nY + t[0]]
                for st in steps:
                    if st == 0:
                        ai += 1
                    else:
                        bi += 1
                    verts.append(s[ai] * nY + t[bi])
                key = tuple(verts)
                out[key] = out.get(key, 0) + sign * a * b
    return Chain(P, c.degree + d.degree, out)


def slant(u: Cochain, z: Chain) -> Chain:
    """Divide a chain on a product by a cochain on the second factor.

    Only the staircases that advance fully through the first factor and
    then fully through the second contribute; degenerate mixtures die.
    """
    P = z.space
    if not hasattr(P, "product_of"):
        raise ValueError("slant wants a chain on a product space")
    X, Y = P.product_of
    if u.space != Y:
        raise ValueError("the cochain must live on the second factor")
    if u.twisted or z.twisted:
        raise ValueError("slant is supported for untwisted inputs only")
    p = u.degree
    out = {}
    for s, c in z.coeffs.items():
        n = len(s) - 1
        k = n - p
        if k < 0:
            continue
        pairs = [_decode(P, v) for v in s]
        # front: X moves, Y frozen; back: X frozen, Y moves
        if any(pairs[i][1] != pairs[0][1] for i in range(k + 1)):
            continue
        if any(pairs[i][0] != pairs[k][0] for i in range(k, n + 1)):
            continue
        xs = tuple(pairs[i][0] for i in range(k + 1))
        ys = tuple(pairs[i][1] for i in range(k, n + 1))
        if len(set(xs)) != k + 1 or len(set(ys)) != p + 1:
            continue
        a = u.values.get(ys, 0)
        if not a:
            continue
        out[xs] = out.get(xs, 0) + c * a
    return Chain(X, z.degree - p, out)


def diagonal_chain(z: Chain) -> Chain:
    """Push a chain to the product of its space with itself.

    Front-face/back-face decomposition followed by the shuffle map; with
    this diagonal, cap(u, z) = slant(u, diagonal_chain(z)) exactly.
    """
    if z.twisted:
        raise ValueError("diagonal is supported for untwisted chains only")
    X = z.space
    P = product_space(X, X)
    out = None
    for s, c in z.coeffs.items():
        n = len(s) - 1
        for k in range(n + 1):
            front = Chain(X, k, {s[: k + 1]: c})
            back = Chain(X, n - k, {s[k:]: 1})
            piece = cross_product(front, back)
            out = piece if out is None else out + piece
    return out if out is not None else Chain(P, z.degree, {})


def simplicial_chain_map(X: SimplicialSpace, Y: SimplicialSpace, vmap,
                         twisted: bool = False) -> ChainMap:
    """Chain map induced by a vertex map under which simplices stay simplices.

    vmap lists an image vertex for every vertex of X.  A simplex whose
    image has repeated vertices contributes zero; otherwise it maps to the
    sorted image with the sign of the sorting permutation.  The result is
    a checked chain map between the two boundary complexes.
    """
    if len(vmap) != X.n:
        raise ValueError("the vertex map must cover every vertex")
    CX = boundary_complex(X, twisted=twisted)
    CY = boundary_complex(Y, twisted=twisted)
    mats = {}
    for q in range(X.dim() + 1):
        rows = {s: i for i, s in enumerate(Y.simplices_of(q))}
        cols = X.simplices_of(q)
        M = [[0] * len(cols) for _ in range(len(rows))]
        for j, s in enumerate(cols):
            img = [vmap[v] for v in s]
            if len(set(img)) != len(img):
                continue
            t = tuple(sorted(img))
            if t not in rows:
                raise ValueError(f"image {t} of {s} is not a simplex of the target")
            sign = 1
            for a in range(len(img)):
                for b in range(a + 1, len(img)):
                    if img[a] > img[b]:
                        sign = -sign
            M[rows[t]][j] = sign
        mats[q] = rmat_from_int(Z, M)
    return ChainMap(CX, CY, mats)


# ---------------------------------------------------------------------------
# covers and transfer
# ---------------------------------------------------------------------------


class SimplicialCover:
    """Finite cover presented by a vertex projection map."""

    def __init__(self, total: SimplicialSpace, base: SimplicialSpace, projection, sheets: int):
        self.total = total
        self.base = base
        self.projection = list(projection)
        self.sheets = sheets
        if len(self.projection) != total.n:
            raise ValueError("projection must list an image for every total vertex")
        fibers = {}
        for s in total.simplices:
            img = tuple(sorted(self.projection[v] for v in s))
            if len(set(img)) != len(s):
                raise ValueError(f"projection collapses the simplex {s}")
            if img not in base.simplices:
                raise ValueError(f"image {img} of {s} is not a base simplex")
            fibers.setdefault(img, []).append(s)
        for s in base.simplices:
            if len(fibers.get(s, [])) != sheets:
                raise ValueError(f"base simplex {s} has {len(fibers.get(s, []))} sheets, wanted {sheets}")
        for (a, b) in total.simplices_of(1):
            pa, pb = self.projection[a], self.projection[b]
            if base.w(pa, pb) != total.w(a, b):
                raise ValueError("total character does not match the base character")
        self.fibers = fibers

    def lift_sign(self, lifted) -> int:
        """Sign of the permutation sorting the projected vertex sequence."""
        seq = [self.projection[v] for v in lifted]
        sign = 1
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if seq[i] > seq[j]:
                    sign = -sign
        return sign

    def to_json(self):
        return {
            "total": self.total.to_json(),
            "base": self.base.to_json(),
            "projection": self.projection,
            "sheets": self.sheets,
        }

    @classmethod
    def from_json(cls, data):
        return cls(SimplicialSpace.from_json(data["total"]),
                   SimplicialSpace.from_json(data["base"]),
                   data["projection"], data["sheets"])


def cyclic_cover(K: SimplicialSpace, voltage, k: int) -> SimplicialCover:
    """k-sheeted cyclic cover from an additive voltage cocycle on edges.

    voltage maps each sorted edge (a, b) to an integer; the cocycle
    condition phi(a,b) + phi(b,c) = phi(a,c) must hold mod k on every
    triangle.  Total vertices are (v, sheet) encoded as v*k + sheet.
    """
    phi = {tuple(sorted(e)): val for e, val in voltage.items()}

    def volt(a, b):
        if a == b:
            return 0
        v = phi.get((min(a, b), max(a, b)), 0)
        return v if a < b else -v

    for (a, b, c) in K.simplices_of(2):
        if (volt(a, b) + volt(b, c) - volt(a, c)) % k:
            raise ValueError(f"voltage is not a cocycle mod {k} on ({a},{b},{c})")

    def enc(v, s):
        return v * k + s

    simplices = set()
    sub = set()
    for s in K.simplices:
        for sheet in range(k):
            lift = tuple(sorted(enc(v, (sheet + volt(s[0], v)) % k) for v in s))
            simplices.add(lift)
            if s in K.sub:
                sub.add(lift)
    char = {}
    for (a, b), val in K.character.items():
        for sa in range(k):
            sb = (sa + volt(a, b)) % k
            e = tuple(sorted((enc(a, sa), enc(b, sb))))
            char[e] = val
    total = SimplicialSpace(K.n * k, simplices, sub, char)
    projection = [v // k for v in range(K.n * k)]
    return SimplicialCover(total, K, projection, k)


def orientation_double_cover(K: SimplicialSpace) -> SimplicialCover:
    """Double cover untwisting the character: voltage 1 on the -1 edges."""
    voltage = {e: 1 for e, val in K.character.items() if val == -1}
    base = K
    cov = cyclic_cover(K, voltage, 2)
    # the total space of the orientation cover is orientable: drop the
    # lifted character (it is trivialized upstairs only when we untwist)
    total = SimplicialSpace(cov.total.n, cov.total.simplices, cov.total.sub)
    return SimplicialCover(total, K.untwisted(), cov.projection, 2)


def transfer(cov: SimplicialCover, x):
    """Wrong-way map: base chains go up, total cochains come down."""
    if isinstance(x, Chain):
        return transfer_chain(cov, x)
    if isinstance(x, Cochain):
        return transfer_cochain(cov, x)
    raise TypeError("transfer wants a Chain or a Cochain")


def transfer_chain(cov: SimplicialCover, z: Chain) -> Chain:
    """Sum of all lifts, with orientation signs for order-scrambling sheets."""
    if z.space != cov.base:
        raise ValueError("transfer_chain wants a chain on the base")
    out = {}
    for s, c in z.coeffs.items():
        for lift in cov.fibers[s]:
            sign = cov.lift_sign(lift)
            t = 1
            if z.twisted:
                v0 = s[0]
                pv0 = cov.projection[lift[0]]
                t = cov.base.w(v0, pv0)
            out[lift] = out.get(lift, 0) + sign * t * c
    return Chain(cov.total, z.degree, out, z.twisted)


def pushforward_chain(cov: SimplicialCover, z: Chain) -> Chain:
    """Project a chain on the total space down, with the same signs."""
    if z.space != cov.total:
        raise ValueError("pushforward_chain wants a chain on the total space")
    out = {}
    for s, c in z.coeffs.items():
        img = tuple(sorted(cov.projection[v] for v in s))
        sign = cov.lift_sign(s)
        t = 1
        if z.twisted:
            t = cov.base.w(img[0], cov.projection[s[0]])
        out[img] = out.get(img, 0) + sign * t * c
    return Chain(cov.base, z.degree, out, z.twisted)


def transfer_cochain(cov: SimplicialCover, u: Cochain) -> Cochain:
    """Adjoint of the chain transfer: sum a total cochain over sheets."""
    if u.space != cov.total:
        raise ValueError("transfer_cochain wants a cochain on the total space")
    out = {}
    for s, lifts in cov.fibers.items():
        total = 0
        for lift in lifts:
            val = u.values.get(lift, 0)
            if val:
                t = 1
                if u.twisted:
                    t = cov.base.w(s[0], cov.projection[lift[0]])
                total += cov.lift_sign(lift) * t * val
        if total:
            out[s] = total
    return Cochain(cov.base, u.degree, out, u.twisted)


def pullback_cochain(cov: SimplicialCover, u: Cochain) -> Cochain:
    if u.space != cov.base:
        raise ValueError("pullback_cochain wants a cochain on the base")
    out = {}
    for s in cov.total.simplices_of(u.degree):
        img = tuple(sorted(cov.projection[v] for v in s))
        val = u.values.get(img, 0)
        if val:
            t = 1
            if u.twisted:
                t = cov.base.w(img[0], cov.projection[s[0]])
            out[s] = cov.lift_sign(s) * t * val
    return Cochain(cov.total, u.degree, out, u.twisted)


# ---------------------------------------------------------------------------
# equivariant complexes from voltages, and orientation characters
# ---------------------------------------------------------------------------


def equivariant_complex(K: SimplicialSpace, voltage, ring: GroupSpec,
                        twisted: bool = False, rel: bool = False) -> BasedComplex:
    """Chain complex of the cover as free modules over the deck ring.

    voltage assigns the deck displacement (an exponent) to each sorted
    edge; the strict cocycle condition phi(a,b)+phi(b,c)=phi(a,c) must
    hold on triangles (mod n for a cyclic(n) ring).  Boundary entries are
    monomials t^phi on leading faces, matching the covering translation
    convention of cyclic_cover.
    """
    phi = {tuple(sorted(e)): val for e, val in voltage.items()}

    def volt(a, b):
        if a == b:
            return 0
        v = phi.get((min(a, b), max(a, b)), 0)
        return v if a < b else -v

    mod = ring.n if ring.kind == "cyclic" else None
    for (a, b, c) in K.simplices_of(2):
        bad = volt(a, b) + volt(b, c) - volt(a, c)
        if bad if mod is None else bad % mod:
            raise ValueError(f"voltage is not a cocycle on ({a},{b},{c})")

    def keep(s):
        return not (rel and s in K.sub)

    bases = {}
    for q in range(0, K.dim() + 1):
        lst = [s for s in K.simplices_of(q) if keep(s)]
        if lst:
            bases[q] = lst
    ranks = {q: len(lst) for q, lst in bases.items()}
    bnd = {}
    for q in sorted(bases):
        if q == 0:
            continue
        rows = {s: i for i, s in enumerate(bases.get(q - 1, []))}
        M = [[ring.zero()] * len(bases[q]) for _ in range(len(bases.get(q - 1, [])))]
        for j, s in enumerate(bases[q]):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                if face not in rows:
                    continue
                if i == 0:
                    coef = K.transport(s[0], s[1], twisted)
                    term = ring.monomial(volt(s[0], s[1]), coef)
                else:
                    term = ring.monomial(0, (-1) ** i)
                M[rows[face]][j] = M[rows[face]][j] + term
        bnd[q] = M
    labels = {q: ["".join(str(v) for v in s) if K.n <= 10 else str(s) for s in lst]
              for q, lst in bases.items()}
    return BasedComplex(ring, ranks, bnd, labels)


def _gf2_solve_span(vectors, target):
    # is target in the GF(2) span of vectors?  vectors, target: int lists
    rows = [list(v) for v in vectors]
    t = list(target)
    m = len(t)
    pivots = []
    for row in rows:
        row = [x % 2 for x in row]
        for pcol, prow in pivots:
            if row[pcol]:
                row = [(a + b) % 2 for a, b in zip(row, prow)]
        lead = next((i for i, x in enumerate(row) if x), None)
        if lead is not None:
            pivots.append((lead, row))
    t = [x % 2 for x in t]
    for pcol, prow in pivots:
        if t[pcol]:
            t = [(a + b) % 2 for a, b in zip(t, prow)]
    return not any(t)


def find_orientation_character(K: SimplicialSpace):
    """Search the finitely many twist classes for one with H_top = Z.

    Candidate characters are +-1 edge cocycles enumerated modulo vertex
    recalibration (coboundaries); for a closed pseudomanifold exactly one
    class makes the top twisted homology infinite cyclic, and the search
    returns that character (the space's orientation character), or None.
    """
    edges = K.simplices_of(1)
    tris = K.simplices_of(2)
    eidx = {e: i for i, e in enumerate(edges)}
    rows = []
    for (a, b, c) in tris:
        row = [0] * len(edges)
        for e in ((a, b), (b, c), (a, c)):
            row[eidx[e]] += 1
        rows.append(row)
    # kernel of the triangle matrix over GF(2)
    basis = []
    pivots = {}
    # gaussian elimination on the transpose to find cocycle space
    work = [[rows[r][c] % 2 for c in range(len(edges))] for r in range(len(rows))]
    pivot_cols = []
    ri = 0
    for col in range(len(edges)):
        sel = None
        for r in range(ri, len(work)):
            if work[r][col]:
                sel = r
                break
        if sel is None:
            continue
        work[ri], work[sel] = work[sel], work[ri]
        for r in range(len(work)):
            if r != ri and work[r][col]:
                work[r] = [(a + b) % 2 for a, b in zip(work[r], work[ri])]
        pivot_cols.append(col)
        ri += 1
    free_cols = [c for c in range(len(edges)) if c not in pivot_cols]
    kernel = []
    for fc in free_cols:
        v = [0] * len(edges)
        v[fc] = 1
        for r, pc in enumerate(pivot_cols):
            if r < ri and work[r][fc]:
                v[pc] = 1
        kernel.append(v)
    # coboundaries: one generator per vertex
    cobs = []
    for vtx in range(K.n):
        v = [0] * len(edges)
        for (a, b) in edges:
            if a == vtx or b == vtx:
                v[eidx[(a, b)]] = 1
        cobs.append(v)
    reps = [[0] * len(edges)]
    for v in kernel:
        if _gf2_solve_span(cobs + [r for r in reps if any(r)], v):
            continue
        reps = reps + [[(a + b) % 2 for a, b in zip(r, v)] for r in reps]
    top = K.dim()
    for rep in reps:
        char = {}
        for e, bit in zip(edges, rep):
            if bit:
                char[e] = -1
        Kw = K.with_character(char)
        # with boundary present the right test is the pair's top homology
        h = space_homology(Kw, twisted=True, rel=bool(K.sub))
        if h.get(top) is not None and h[top].invariants() == (1, ()):
            return char
    return None


# ---------------------------------------------------------------------------
# barycentric subdivision and the last-vertex map
# ---------------------------------------------------------------------------


def barycentric(K: SimplicialSpace) -> SimplicialSpace:
    """Barycentric subdivision, one vertex per simplex of K.

    New vertices are numbered by (dimension, vertex tuple), so every flag
    of faces is an ascending tuple.  The character moves to an edge
    between barycenters as the transport between the leading vertices of
    the two faces; its cocycle condition is inherited.  The result keeps
    .base, .bary_of (new vertex -> simplex) and .vertex_of (simplex ->
    new vertex).
    """
    order = sorted(K.simplices, key=lambda s: (len(s), s))
    vertex_of = {s: i for i, s in enumerate(order)}

    chains_at = {}

    def chains(s):
        if s not in chains_at:
            out = [(s,)]
            for k in range(1, len(s)):
                for f in combinations(s, k):
                    out.extend(c + (s,) for c in chains(f))
            chains_at[s] = out
        return chains_at[s]

    simplices = set()
    sub = set()
    for s in K.simplices:
        for c in chains(s):
            flag = tuple(vertex_of[f] for f in c)
            simplices.add(flag)
            if s in K.sub:
                sub.add(flag)
    char = {}
    if K.character:
        for flag in simplices:
            if len(flag) == 2:
                a, b = order[flag[0]], order[flag[1]]
                val = K.w(a[0], b[0])
                if val == -1:
                    char[flag] = -1
    sd = SimplicialSpace(len(order), simplices, sub, char)
    sd.base = K
    sd.bary_of = order
    sd.vertex_of = vertex_of
    return sd


def _sd_terms(s):
    # flags of the full chain sd(s) with signs, from the cone recursion
    # sd(s) = (-1)^q * (barycenter appended to sd of the boundary)
    if len(s) == 1:
        return [((s,), 1)]
    q = len(s) - 1
    out = []
    for i in range(len(s)):
        face = s[:i] + s[i + 1:]
        fsign = (-1) ** (q + i)
        for flag, sign in _sd_terms(face):
            out.append((flag + (s,), fsign * sign))
    return out


def subdivision_chain(z: Chain, sd: SimplicialSpace) -> Chain:
    """Push a chain into the barycentric subdivision."""
    if sd.base != z.space:
        raise ValueError("subdivision target does not come from the chain's space")
    K = z.space
    out = {}
    for s, c in z.coeffs.items():
        for flag, sign in _sd_terms(s):
            t = K.transport(s[0], flag[0][0], z.twisted)
            key = tuple(sd.vertex_of[f] for f in flag)
            out[key] = out.get(key, 0) + sign * t * c
    return Chain(sd, z.degree, out, z.twisted)


def last_vertex_chain(z: Chain, K: SimplicialSpace | None = None) -> Chain:
    """Project a chain on a subdivision back along the last-vertex map."""
    sd = z.space
    if not hasattr(sd, "base"):
        raise ValueError("last_vertex_chain wants a chain on a barycentric subdivision")
    K = sd.base if K is None else K
    out = {}
    for flag, c in z.coeffs.items():
        faces = [sd.bary_of[v] for v in flag]
        verts = tuple(max(f) for f in faces)
        if len(set(verts)) != len(verts):
            continue
        t = K.transport(faces[0][0], verts[0], z.twisted)
        out[verts] = out.get(verts, 0) + t * c
    return Chain(K, z.degree, out, z.twisted)


def _chain_map_from(fn, src_space, dst_space, C, D, twisted):
    from .chains import ChainMap
    mats = {}
    for q in range(0, max(src_space.dim(), 0) + 1):
        basis = src_space.simplices_of(q)
        rows = dst_space.simplices_of(q)
        ridx = {s: i for i, s in enumerate(rows)}
        M = [[Z.zero()] * len(basis) for _ in range(len(rows))]
        for j, s in enumerate(basis):
            img = fn(Chain(src_space, q, {s: 1}, twisted))
            for t, c in img.coeffs.items():
                M[ridx[t]][j] = Z.monomial(0, c)
        if M:
            mats[q] = M
    return ChainMap(C, D, mats)


def subdivision_map(K: SimplicialSpace, twisted: bool = False):
    """(sd K, chain map C(K) -> C(sd K)) for the barycentric subdivision."""
    sd = barycentric(K)
    C = boundary_complex(K, twisted=twisted)
    D = boundary_complex(sd, twisted=twisted)
    f = _chain_map_from(lambda z: subdivision_chain(z, sd), K, sd, C, D, twisted)
    return sd, f


def last_vertex_map(K: SimplicialSpace, twisted: bool = False):
    """(sd K, chain map C(sd K) -> C(K)) along the last-vertex projection."""
    sd = barycentric(K)
    C = boundary_complex(sd, twisted=twisted)
    D = boundary_complex(K, twisted=twisted)
    f = _chain_map_from(lambda z: last_vertex_chain(z, K), sd, K, C, D, twisted)
    return sd, f
