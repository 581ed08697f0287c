"""Finite filtered cochain complexes, their spectral sequences and the
constructions on them (suspension, shift, decalage, cones, limits and
colimits, representing objects).

A filtered complex is stored in an adapted basis: every basis vector of A^n
carries an integer weight and F_pA^n is spanned by the vectors of weight
at most p.
"""
import singer

from spectral_models.linalg import (QQ, DimensionMismatch, Matrix, Subspace,
                                    adapted_basis, block_matrix, check_same_field,
                                    hstack, image, intersect, inverse, is_invertible,
                                    kernel_basis, preimage, quotient, rank,
                                    solve_block_maps, solve_matrix, subspace_sum,
                                    vstack)


class InvalidComplex(Exception):
    """A complex or morphism violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvariantViolation(Exception):
    """An internal containment or commutation check failed."""


class NotStrict(Exception):
    """A pushout leg is not a strict monomorphism."""


class FilteredComplex:
    def __init__(self, field, weights, differentials=None):
        self.field = field
        self._weights = {int(n): tuple(int(w) for w in ws)
                         for n, ws in weights.items() if len(ws) > 0}
        self._differentials = {}
        for n, m in (differentials or {}).items():
            n = int(n)
            check_same_field(field, m.field)
            expected = (self.dim(n + 1), self.dim(n))
            if m.shape != expected:
                raise DimensionMismatch("d_{} has shape {}, expected {}".format(n, m.shape, expected))
            if m.rows and m.cols:
                self._differentials[n] = m
        self._pages = {}

    @property
    def degrees(self):
        return sorted(self._weights)

    def dim(self, n):
        return len(self._weights.get(n, ()))

    def weights(self, n):
        return self._weights.get(n, ())

    def differential(self, n):
        m = self._differentials.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.dim(n + 1), self.dim(n))
        return m

    def weight_range(self):
        ws = [w for ws in self._weights.values() for w in ws]
        if not ws:
            return None
        return min(ws), max(ws)

    def filtration(self, p, n):
        """F_pA^n as a coordinate subspace of A^n."""
        return Subspace.coordinate(self.field, self.dim(n),
                                   [i for i, w in enumerate(self.weights(n)) if w <= p])

    def is_zero(self):
        return not self._weights

    def __eq__(self, other):
        if not isinstance(other, FilteredComplex):
            return NotImplemented
        return (self.field == other.field and self._weights == other._weights
                and all(self.differential(n) == other.differential(n) for n in self.degrees))

    __hash__ = None

    def __repr__(self):
        return "FilteredComplex({}, {})".format(
            self.field.name, {n: list(ws) for n, ws in sorted(self._weights.items())})


class ChainMap:
    def __init__(self, source, target, maps=None):
        self.source = source
        self.target = target
        self.field = check_same_field(source.field, target.field)
        self._maps = {}
        for n, m in (maps or {}).items():
            n = int(n)
            expected = (target.dim(n), source.dim(n))
            if m.shape != expected:
                raise DimensionMismatch("f_{} has shape {}, expected {}".format(n, m.shape, expected))
            if m.rows and m.cols:
                self._maps[n] = m

    @property
    def degrees(self):
        return sorted(set(self.source.degrees) | set(self.target.degrees))

    def map(self, n):
        m = self._maps.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.target.dim(n), self.source.dim(n))
        return m

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(self.map(n) == other.map(n) for n in self.degrees))

    __hash__ = None

    def __repr__(self):
        return "ChainMap({!r} -> {!r})".format(self.source, self.target)


def _filtration_violations(m, row_weights, col_weights, label):
    found = []
    for i in range(m.rows):
        for j in range(m.cols):
            if m[i, j] != 0 and row_weights[i] > col_weights[j]:
                found.append("{} raises filtration: column {} (weight {}) hits row {} (weight {})".format(
                    label, j, col_weights[j], i, row_weights[i]))
    return found


def validate(A):
    """Every violated invariant of A, as a list of messages."""
    found = []
    for n in A.degrees:
        d = A.differential(n)
        if A.dim(n + 2) and A.dim(n + 1):
            if not (A.differential(n + 1) @ d).is_zero():
                found.append("d_{0}·d_{1} != 0 at degree {1}".format(n + 1, n))
        found.extend(_filtration_violations(d, A.weights(n + 1), A.weights(n), "d_{}".format(n)))
    return found


def validate_map(f):
    found = []
    A, B = f.source, f.target
    for n in f.degrees:
        lhs = f.map(n + 1) @ A.differential(n)
        rhs = B.differential(n) @ f.map(n)
        if lhs != rhs:
            found.append("chain condition fails at degree {}".format(n))
        found.extend(_filtration_violations(f.map(n), B.weights(n), A.weights(n), "f_{}".format(n)))
    return found


def checked(A):
    violations = validate(A)
    if violations:
        raise InvalidComplex(violations)
    return A


def checked_map(f):
    violations = validate_map(f)
    if violations:
        raise InvalidComplex(violations)
    return f


# Morphism plumbing

def identity_map(A):
    return ChainMap(A, A, {n: Matrix.identity(A.field, A.dim(n)) for n in A.degrees})


def zero_map(A, B):
    return ChainMap(A, B)


def compose(g, f):
    """g∘f."""
    return ChainMap(f.source, g.target, {n: g.map(n) @ f.map(n) for n in f.degrees})


def zero_complex(field=QQ):
    return FilteredComplex(field, {})


def pure(p, n, field=QQ):
    """A single generator of weight p in degree n."""
    return FilteredComplex(field, {n: [p]})


def direct_sum(*complexes):
    """A_1 ⊕ ... ⊕ A_k with its injections and projections."""
    field = check_same_field(*[c.field for c in complexes])
    degrees = sorted(set(n for c in complexes for n in c.degrees))
    weights = {n: [w for c in complexes for w in c.weights(n)] for n in degrees}
    diffs = {}
    for n in degrees:
        diffs[n] = block_matrix(field, [c.dim(n + 1) for c in complexes], [c.dim(n) for c in complexes],
                                {(k, k): c.differential(n) for k, c in enumerate(complexes)})
    total = FilteredComplex(field, weights, diffs)
    injections, projections = [], []
    for k, c in enumerate(complexes):
        inj, proj = {}, {}
        for n in degrees:
            sizes = [x.dim(n) for x in complexes]
            inj[n] = block_matrix(field, sizes, [c.dim(n)], {(k, 0): Matrix.identity(field, c.dim(n))})
            proj[n] = block_matrix(field, [c.dim(n)], sizes, {(0, k): Matrix.identity(field, c.dim(n))})
        injections.append(ChainMap(c, total, inj))
        projections.append(ChainMap(total, c, proj))
    return total, injections, projections


def direct_sum_map(f, g):
    S, _, _ = direct_sum(f.source, g.source)
    T, _, _ = direct_sum(f.target, g.target)
    field = f.field
    return ChainMap(S, T, {n: block_matrix(field, [f.target.dim(n), g.target.dim(n)],
                                           [f.source.dim(n), g.source.dim(n)],
                                           {(0, 0): f.map(n), (1, 1): g.map(n)})
                           for n in sorted(set(S.degrees) | set(T.degrees))})


def fold(f, g):
    """The map f ⊕ g followed by the codiagonal; f and g share a target."""
    S, _, _ = direct_sum(f.source, g.source)
    field = f.field
    return ChainMap(S, f.target, {n: hstack(field, f.target.dim(n), [f.map(n), g.map(n)])
                                  for n in sorted(set(S.degrees) | set(f.target.degrees))})


def joint_window(*complexes):
    """(degrees, weight range) covering all operands, or (degrees, None)."""
    degrees = sorted(set(n for c in complexes for n in c.degrees))
    ranges = [c.weight_range() for c in complexes if c.weight_range() is not None]
    if not ranges:
        return degrees, None
    return degrees, (min(lo for lo, _ in ranges), max(hi for _, hi in ranges))


# Spectral sequence

def cycles(A, r, p, n):
    """Z_r^{p,p+n}(A) = F_pA^n ∩ d^{-1}F_{p-r}A^{n+1}."""
    if r < 0:
        raise ValueError("r must be non-negative, got {}".format(r))
    fp = A.filtration(p, n)
    if A.dim(n) == 0 or A.dim(n + 1) == 0:
        return fp
    return intersect(fp, preimage(A.differential(n), A.filtration(p - r, n + 1)))


def boundaries(A, r, p, n):
    """B_r^{p,p+n}(A) as a subspace of A^n."""
    if r < 0:
        raise ValueError("r must be non-negative, got {}".format(r))
    if r == 0:
        result = A.filtration(p - 1, n)
    else:
        incoming = image(A.differential(n - 1), cycles(A, r - 1, p + r - 1, n - 1))
        result = subspace_sum(incoming, cycles(A, r - 1, p - 1, n))
    if not cycles(A, r, p, n).contains(result):
        raise InvariantViolation("B_{} not inside Z_{} at ({}, {})".format(r, r, p, p + n))
    return result


class PageEntry:
    """One nonzero entry E_r^{p,q} = Z/B with representatives."""

    def __init__(self, p, q, space):
        self.p = p
        self.q = q
        self.space = space

    @property
    def n(self):
        return self.q - self.p

    @property
    def dim(self):
        return self.space.dim

    def representatives(self):
        return self.space.representatives()

    def classify(self, v):
        return self.space.classify(v)


class PageTable:
    """The nonzero entries of a page and its differentials.

    `differentials[(p, q)]` is the matrix of d_r from (p, q) to
    (p - r, q - r + 1) in the entries' quotient coordinates.
    """

    def __init__(self, field, r, entries, differentials):
        self.field = field
        self.r = r
        self.entries = entries
        self.differentials = differentials

    def dim(self, p, q):
        e = self.entries.get((p, q))
        return e.dim if e is not None else 0

    def support(self):
        return sorted(self.entries)

    def dims(self):
        return {key: e.dim for key, e in sorted(self.entries.items())}

    def target(self, key):
        p, q = key
        return (p - self.r, q - self.r + 1)

    def differential(self, key):
        m = self.differentials.get(key)
        if m is None:
            return Matrix.zeros(self.field, self.dim(*self.target(key)), self.dim(*key))
        return m

    def is_zero(self):
        return not self.entries

    def check_square_zero(self):
        for key in self.differentials:
            after = self.target(key)
            if after in self.differentials:
                if not (self.differentials[after] @ self.differentials[key]).is_zero():
                    raise InvariantViolation("d_{0}∘d_{0} != 0 at {1}".format(self.r, key))

    def homology_dims(self):
        """Dimensions of ker d_r / im d_r, the next page predicted from this one."""
        incoming = {}
        for key, m in self.differentials.items():
            incoming[self.target(key)] = m
        out = {}
        for key, e in self.entries.items():
            d_out = self.differentials.get(key)
            d_in = incoming.get(key)
            h = e.dim - (rank(d_out) if d_out is not None else 0) - (rank(d_in) if d_in is not None else 0)
            if h:
                out[key] = h
        return dict(sorted(out.items()))


def _assemble_page(field, r, entries, push):
    """Build a PageTable given entries and a function pushing a representative forward."""
    diffs = {}
    for key, e in entries.items():
        p, q = key
        t = entries.get((p - r, q - r + 1))
        if t is None:
            continue
        columns = [t.classify(push(e, v)) for v in e.representatives()]
        diffs[key] = Matrix.from_columns(field, t.dim, columns)
    table = PageTable(field, r, entries, diffs)
    table.check_square_zero()
    return table


def page(A, r):
    """The r-page of the spectral sequence of A over its finite support."""
    if r < 0:
        raise ValueError("r must be non-negative, got {}".format(r))
    if r in A._pages:
        return A._pages[r]
    entries = {}
    bounds = A.weight_range()
    if bounds is not None:
        lo, hi = bounds
        for n in A.degrees:
            for p in range(lo - r - 1, hi + r + 2):
                z = cycles(A, r, p, n)
                if z.dim == 0:
                    continue
                q = quotient(z, boundaries(A, r, p, n))
                if q.dim:
                    entries[(p, p + n)] = PageEntry(p, p + n, q)
    singer.log_debug("Page %s: %s nonzero entries", r, len(entries))

    def push(entry, v):
        return A.differential(entry.n).apply(v)

    table = _assemble_page(A.field, r, entries, push)
    A._pages[r] = table
    return table


def _page_map(field, page_a, page_b, push):
    out = {}
    for key in sorted(set(page_a.entries) | set(page_b.entries)):
        ea, eb = page_a.entries.get(key), page_b.entries.get(key)
        if ea is None or eb is None:
            out[key] = Matrix.zeros(field, page_b.dim(*key), page_a.dim(*key))
            continue
        out[key] = Matrix.from_columns(field, eb.dim,
                                       [eb.classify(push(ea, v)) for v in ea.representatives()])
    for key, m in out.items():
        target = page_a.target(key)
        after = out.get(target)
        if after is None:
            after = Matrix.zeros(field, page_b.dim(*target), page_a.dim(*target))
        if page_b.differential(key) @ m != after @ page_a.differential(key):
            raise InvariantViolation("page map does not commute with d_{} at {}".format(page_a.r, key))
    return out


def page_map(f, r):
    """E_r(f) per bidegree, in the quotient coordinates of both pages."""
    def push(entry, v):
        return f.map(entry.n).apply(v)
    return _page_map(f.field, page(f.source, r), page(f.target, r), push)


def _invertible_everywhere(matrices):
    return all(is_invertible(m) for m in matrices.values())


def is_r_weq(f, r):
    """True iff f induces an isomorphism of (r+1)-pages."""
    return _invertible_everywhere(page_map(f, r + 1))


def is_r_acyclic(A, r):
    return page(A, r + 1).is_zero()


def page_injectivity_failures(f, k):
    return [key for key, m in page_map(f, k).items() if rank(m) != m.cols]


def page_surjectivity_failures(f, k):
    return [key for key, m in page_map(f, k).items() if rank(m) != m.rows]


def is_page_injective(f, k):
    return not page_injectivity_failures(f, k)


def is_page_surjective(f, k):
    return not page_surjectivity_failures(f, k)


def _cycle_window(f, k):
    degrees, bounds = joint_window(f.source, f.target)
    if bounds is None:
        return []
    lo, hi = bounds
    return [(p, n) for n in degrees for p in range(lo - k - 1, hi + k + 2)]


def cycle_surjectivity_failures(f, k):
    """Bidegrees (p, p+n) where Z_k(f) is not surjective."""
    failures = []
    for p, n in _cycle_window(f, k):
        zb = cycles(f.target, k, p, n)
        if zb.dim == 0:
            continue
        if image(f.map(n), cycles(f.source, k, p, n)).dim < zb.dim:
            failures.append((p, p + n))
    return failures


def cycle_injectivity_failures(f, k):
    failures = []
    for p, n in _cycle_window(f, k):
        za = cycles(f.source, k, p, n)
        if za.dim and image(f.map(n), za).dim < za.dim:
            failures.append((p, p + n))
    return failures


def is_cycle_surjective(f, k):
    return not cycle_surjectivity_failures(f, k)


def is_cycle_injective(f, k):
    return not cycle_injectivity_failures(f, k)


# Suspension, loops, shift, decalage

def suspension(A, r):
    """(Σ^rA)^n = A^{n+1} with weights raised by r and d negated."""
    return FilteredComplex(A.field, {n - 1: [w + r for w in A.weights(n)] for n in A.degrees},
                           {n - 1: -A.differential(n) for n in A.degrees})


def loops(A, r):
    """(Ω^rA)^n = A^{n-1} with weights lowered by r and d negated."""
    return FilteredComplex(A.field, {n + 1: [w - r for w in A.weights(n)] for n in A.degrees},
                           {n + 1: -A.differential(n) for n in A.degrees})


def suspension_map(f, r):
    return ChainMap(suspension(f.source, r), suspension(f.target, r),
                    {n - 1: f.map(n) for n in f.degrees})


def loops_map(f, r):
    return ChainMap(loops(f.source, r), loops(f.target, r),
                    {n + 1: f.map(n) for n in f.degrees})


def shift(A, r):
    """F_p(S^rA)^n = F_{p+rn}A^n: a degree-n weight w becomes w - rn."""
    return FilteredComplex(A.field, {n: [w - r * n for w in A.weights(n)] for n in A.degrees},
                           {n: A.differential(n) for n in A.degrees})


def shift_map(f, r):
    return ChainMap(shift(f.source, r), shift(f.target, r), {n: f.map(n) for n in f.degrees})


def _decalage_bases(A, r):
    bases = {}
    bounds = A.weight_range()
    if bounds is None:
        return bases
    lo, hi = bounds
    for n in A.degrees:
        levels = [(p, cycles(A, r, p - r * n, n))
                  for p in range(lo + r * n, hi + r * n + r + 1)]
        bases[n] = adapted_basis(A.field, A.dim(n), levels)
    return bases


def decalage(A, r):
    """F_p(Dec^rA)^n = Z_r^{p-rn}(A^n), re-expressed in an adapted basis."""
    bases = _decalage_bases(A, r)
    diffs = {}
    for n in A.degrees:
        if n + 1 in bases:
            diffs[n] = inverse(bases[n + 1][0]) @ A.differential(n) @ bases[n][0]
    return FilteredComplex(A.field, {n: ws for n, (_, ws) in bases.items()}, diffs)


def decalage_map(f, r):
    source_bases = _decalage_bases(f.source, r)
    target_bases = _decalage_bases(f.target, r)
    maps = {}
    for n in f.degrees:
        if n in source_bases and n in target_bases:
            maps[n] = inverse(target_bases[n][0]) @ f.map(n) @ source_bases[n][0]
    return ChainMap(decalage(f.source, r), decalage(f.target, r), maps)


# Cones

def cone(f, r):
    """The r-cone Σ^rA ⊕ B with d(a, b) = (-da, fa + db).

    Returns (C, inclusion of B, projection onto Σ^rA).
    """
    A, B = f.source, f.target
    field = f.field
    degrees = sorted(set(n - 1 for n in A.degrees) | set(B.degrees))
    weights = {n: [w + r for w in A.weights(n + 1)] + list(B.weights(n)) for n in degrees}
    diffs = {}
    for n in degrees:
        diffs[n] = block_matrix(field, [A.dim(n + 2), B.dim(n + 1)], [A.dim(n + 1), B.dim(n)],
                                {(0, 0): -A.differential(n + 1),
                                 (1, 0): f.map(n + 1),
                                 (1, 1): B.differential(n)})
    C = FilteredComplex(field, weights, diffs)
    violations = validate(C)
    if violations:
        raise InvariantViolation("cone is not a filtered complex: {}".format("; ".join(violations)))
    incl = ChainMap(B, C, {n: block_matrix(field, [A.dim(n + 1), B.dim(n)], [B.dim(n)],
                                            {(1, 0): Matrix.identity(field, B.dim(n))})
                           for n in B.degrees})
    sigma = suspension(A, r)
    proj = ChainMap(C, sigma, {n: block_matrix(field, [A.dim(n + 1)], [A.dim(n + 1), B.dim(n)],
                                               {(0, 0): Matrix.identity(field, A.dim(n + 1))})
                               for n in sigma.degrees})
    return C, incl, proj


def omega_cone_fibration(A, r):
    """π_1: Ω^rC_r(id_A) → A, the projection (a, b) ↦ a."""
    C, _, _ = cone(identity_map(A), r)
    L = loops(C, r)
    field = A.field
    pi = ChainMap(L, A, {n: block_matrix(field, [A.dim(n)], [A.dim(n), A.dim(n - 1)],
                                         {(0, 0): Matrix.identity(field, A.dim(n))})
                         for n in A.degrees})
    for k in range(r + 1):
        failures = cycle_surjectivity_failures(pi, k)
        if failures:
            raise InvariantViolation("Z_{}(π_1) not surjective at {}".format(k, failures[0]))
    return pi


# Representing objects

def rep_cycle(r, p, n, field=QQ):
    """𝒵_r(p,n): u in degree n of weight p, du = v of weight p-r."""
    return FilteredComplex(field, {n: [p], n + 1: [p - r]},
                           {n: Matrix.identity(field, 1)})


def rep_boundary(r, p, n, field=QQ):
    """ℬ_r(p,n); for r = 0 this is 𝒵_0(p-1,n), representing F_{p-1}."""
    if r == 0:
        return rep_cycle(0, p - 1, n, field)
    return FilteredComplex(field, {n - 1: [p + r - 1], n: [p, p - 1], n + 1: [p - r]},
                           {n - 1: Matrix.from_rows(field, [[1], [0]]),
                            n: Matrix.from_rows(field, [[0, 1]])})


def phi(r, p, n, field=QQ):
    """φ_r: 𝒵_r(p,n) → ℬ_r(p,n), diagonal in degree n and identity in degree n+1."""
    source = rep_cycle(r, p, n, field)
    target = rep_boundary(r, p, n, field)
    if r == 0:
        maps = {n: Matrix.identity(field, 1), n + 1: Matrix.identity(field, 1)}
    else:
        maps = {n: Matrix.from_rows(field, [[1], [1]]), n + 1: Matrix.identity(field, 1)}
    return ChainMap(source, target, maps)


def cycle_map(A, r, p, n, a):
    """The map 𝒵_r(p,n) → A sending u to the r-cycle a."""
    field = A.field
    if not cycles(A, r, p, n).contains_vector(a):
        raise ValueError("vector is not an r-cycle at ({}, {})".format(p, p + n))
    maps = {n: Matrix.from_columns(field, A.dim(n), [a])}
    if A.dim(n + 1):
        maps[n + 1] = Matrix.from_columns(field, A.dim(n + 1), [A.differential(n).apply(a)])
    return ChainMap(rep_cycle(r, p, n, field), A, maps)


def hom_space(X, A):
    """A basis of Hom(X, A) in the category of filtered complexes."""
    field = check_same_field(X.field, A.field)
    blocks = {}
    for n in X.degrees:
        if A.dim(n):
            wa, wx = A.weights(n), X.weights(n)
            blocks[n] = (A.dim(n), X.dim(n), lambda i, j, wa=wa, wx=wx: wa[i] <= wx[j])
    relations = []
    for n in X.degrees:
        terms = []
        if n + 1 in blocks:
            terms.append((None, n + 1, X.differential(n)))
        if n in blocks and A.dim(n + 1):
            terms.append((-A.differential(n), n, None))
        if terms and A.dim(n + 1) and X.dim(n):
            relations.append((terms, A.dim(n + 1), X.dim(n)))
    homs = [ChainMap(X, A, maps) for maps in solve_block_maps(field, blocks, relations)]
    return len(homs), homs


def page_dim_via_hom(A, r, p, n):
    """dim E_r^{p,p+n}(A) as Hom(𝒵_r, A) modulo the image of φ_r^*."""
    field = A.field
    if A.dim(n) == 0:
        return 0
    dim_z, _ = hom_space(rep_cycle(r, p, n, field), A)
    _, homs = hom_space(rep_boundary(r, p, n, field), A)
    ph = phi(r, p, n, field)
    generator = (field.one,)
    hit = Subspace(field, A.dim(n), [compose(g, ph).map(n).apply(generator) for g in homs])
    return dim_z - hit.dim


def lift_cycle(q, s, p, n, y):
    """Lift y: 𝒵_s(p,n) → B through q: E → B, or None."""
    E = q.source
    z = cycles(E, s, p, n)
    target = y.map(n).column(0) if y.target.dim(n) else ()
    if not target:
        return cycle_map(E, s, p, n, tuple(E.field.zero for _ in range(E.dim(n))))
    restricted = q.map(n) @ z.basis
    coeffs = solve_matrix(restricted, Matrix.from_columns(E.field, len(target), [target]))
    if coeffs is None:
        return None
    return cycle_map(E, s, p, n, z.basis.apply(coeffs.column(0)))


# Kernels, cokernels, limits and colimits

def _subcomplex(E, spaces):
    """The subcomplex spanned degreewise by `spaces` with induced filtration."""
    field = E.field
    bases, weights = {}, {}
    bounds = E.weight_range()
    for n, space in sorted(spaces.items()):
        if space.dim == 0:
            continue
        lo, hi = bounds
        levels = []
        for p in range(lo, hi + 1):
            level = intersect(space, E.filtration(p, n))
            levels.append((p, Subspace(field, space.dim, [space.coordinates(v) for v in level.vectors()])))
        T, ws = adapted_basis(field, space.dim, levels)
        bases[n] = space.basis @ T
        weights[n] = ws
    diffs = {}
    for n, basis in bases.items():
        pushed = E.differential(n) @ basis
        if n + 1 not in bases:
            if not pushed.is_zero():
                raise InvariantViolation("subspace family is not closed under d at degree {}".format(n))
            continue
        d = solve_matrix(bases[n + 1], pushed)
        if d is None:
            raise InvariantViolation("subspace family is not closed under d at degree {}".format(n))
        diffs[n] = d
    S = FilteredComplex(field, weights, diffs)
    return S, ChainMap(S, E, bases)


def _quotient_complex(E, spaces):
    """E modulo a subcomplex, filtered by the images of F_pE."""
    field = E.field
    projections, sections, weights = {}, {}, {}
    bounds = E.weight_range()
    for n in E.degrees:
        space = spaces.get(n, Subspace.zero(field, E.dim(n)))
        q = quotient(Subspace.full(field, E.dim(n)), space)
        if q.dim == 0:
            continue
        lo, hi = bounds
        levels = [(p, image(q.projector, E.filtration(p, n))) for p in range(lo, hi + 1)]
        T, ws = adapted_basis(field, q.dim, levels)
        projections[n] = inverse(T) @ q.projector
        sections[n] = q.section @ T
        weights[n] = ws
    diffs = {n: projections[n + 1] @ E.differential(n) @ sections[n]
             for n in projections if n + 1 in projections}
    Q = FilteredComplex(field, weights, diffs)
    return Q, ChainMap(E, Q, projections)


def kernel(f):
    """(ker f, inclusion) with the induced filtration."""
    return _subcomplex(f.source, {n: kernel_basis(f.map(n)) for n in f.source.degrees})


def cokernel(f):
    """(coker f, projection) filtered by the image filtration."""
    return _quotient_complex(f.target, {n: image(f.map(n)) for n in f.target.degrees})


def is_injective(f):
    return all(rank(f.map(n)) == f.source.dim(n) for n in f.source.degrees)


def is_strict(f):
    """Whenever f(a) ∈ F_pB^n then a ∈ F_pA^n."""
    A, B = f.source, f.target
    degrees, bounds = joint_window(A, B)
    if bounds is None:
        return True
    lo, hi = bounds
    for n in A.degrees:
        for p in range(lo - 1, hi + 1):
            if not A.filtration(p, n).contains(preimage(f.map(n), B.filtration(p, n))):
                return False
    return True


def is_filtered_iso(f):
    for n in f.degrees:
        m = f.map(n)
        if not is_invertible(m):
            return False
        if _filtration_violations(inverse(m), f.source.weights(n), f.target.weights(n), "inverse"):
            return False
    return True


def is_effective_mono(f):
    """f is injective and the comparison with ker(coker f) is a filtered isomorphism."""
    if not is_injective(f):
        return False
    _, q = cokernel(f)
    K, k = kernel(q)
    maps = {}
    for n in f.source.degrees:
        c = solve_matrix(k.map(n), f.map(n))
        if c is None:
            return False
        maps[n] = c
    return is_filtered_iso(ChainMap(f.source, K, maps))


def pullback(f, g):
    """Fiber product of f: A → X and g: B → X; returns (P, leg to A, leg to B)."""
    A, B = f.source, g.source
    E, _, (proj_a, proj_b) = direct_sum(A, B)
    spaces = {n: kernel_basis(hstack(f.field, f.target.dim(n), [f.map(n), -g.map(n)]))
              for n in E.degrees}
    P, incl = _subcomplex(E, spaces)
    return P, compose(proj_a, incl), compose(proj_b, incl)


def pushout(f, g):
    """Pushout of f: X → A along the strict monomorphism g: X → B.

    Returns (P, leg from A, leg from B).
    """
    if not (is_injective(g) and is_strict(g)):
        raise NotStrict("pushout leg must be a strict monomorphism")
    A, B = f.target, g.target
    E, (inj_a, inj_b), _ = direct_sum(A, B)
    X = f.source
    spaces = {n: image(vstack(f.field, X.dim(n), [f.map(n), -g.map(n)])) for n in E.degrees}
    P, q = _quotient_complex(E, spaces)
    return P, compose(q, inj_a), compose(q, inj_b)


# Separating morphisms

def alpha_morphism(s, p, n, field=QQ):
    """α_s: 𝒵_{s+1}(p+1,n) → 𝒵_s(p,n), the identity on both generators."""
    one = Matrix.identity(field, 1)
    return ChainMap(rep_cycle(s + 1, p + 1, n, field), rep_cycle(s, p, n, field), {n: one, n + 1: one})


def beta_morphism(s, p, n, field=QQ):
    """β_s: 𝒵_{s-1}(p,n) ⊕ R^{n+1}_{(p-s)} → 𝒵_s(p,n)."""
    if s < 1:
        raise ValueError("beta needs s >= 1, got {}".format(s))
    source, _, _ = direct_sum(rep_cycle(s - 1, p, n, field), pure(p - s, n + 1, field))
    return ChainMap(source, rep_cycle(s, p, n, field),
                    {n: Matrix.identity(field, 1), n + 1: Matrix.from_rows(field, [[1, 1]])})


def gamma_morphism(s, p, n, field=QQ):
    """γ_s = ∇∘(α_s ⊕ β_s); for s = 0 only α_0 exists and is used alone."""
    if s == 0:
        return alpha_morphism(0, p, n, field)
    return fold(alpha_morphism(s, p, n, field), beta_morphism(s, p, n, field))
