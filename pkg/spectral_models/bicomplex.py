"""Finite bicomplexes and the witness-cycle description of their spectral
sequence.

Cells A^{i,j} carry a vertical differential d0: (i,j) → (i,j+1) and a
horizontal differential d1: (i,j) → (i-1,j) which commute. An r-witness
cycle at (p,q) is a tuple (a_0, ..., a_{r-1}) with a_k in A^{p-k,q-k},
d0 a_0 = 0 and d0 a_k = d1 a_{k-1}.
"""
import singer

from spectral_models.filtered import (InvalidComplex, InvariantViolation, PageEntry,
                                      _assemble_page, _invertible_everywhere, _page_map)
from spectral_models.linalg import (QQ, DimensionMismatch, Matrix, Subspace,
                                    block_diag, block_matrix, check_same_field, hstack,
                                    image, inverse, kernel_basis, kron, quotient, rank,
                                    solve, solve_block_maps, solve_matrix, vstack)


class Bicomplex:
    def __init__(self, field, cells, d0=None, d1=None):
        self.field = field
        self._cells = {(int(i), int(j)): int(d) for (i, j), d in cells.items() if d > 0}
        self._d0 = self._collect(d0, lambda i, j: (i, j + 1), "d0")
        self._d1 = self._collect(d1, lambda i, j: (i - 1, j), "d1")
        self._pages = {}

    def _collect(self, maps, step, label):
        kept = {}
        for (i, j), m in (maps or {}).items():
            i, j = int(i), int(j)
            check_same_field(self.field, m.field)
            expected = (self.dim(*step(i, j)), self.dim(i, j))
            if m.shape != expected:
                raise DimensionMismatch("{} at ({}, {}) has shape {}, expected {}".format(
                    label, i, j, m.shape, expected))
            if m.rows and m.cols:
                kept[(i, j)] = m
        return kept

    @property
    def cells(self):
        return sorted(self._cells)

    def dim(self, i, j):
        return self._cells.get((i, j), 0)

    def vertical(self, i, j):
        """d0 out of (i, j)."""
        m = self._d0.get((i, j))
        if m is None:
            return Matrix.zeros(self.field, self.dim(i, j + 1), self.dim(i, j))
        return m

    def horizontal(self, i, j):
        """d1 out of (i, j)."""
        m = self._d1.get((i, j))
        if m is None:
            return Matrix.zeros(self.field, self.dim(i - 1, j), self.dim(i, j))
        return m

    def column_range(self):
        if not self._cells:
            return None
        cols = [i for i, _ in self._cells]
        return min(cols), max(cols)

    def total_degrees(self):
        return sorted(set(j - i for i, j in self._cells))

    def is_zero(self):
        return not self._cells

    def __eq__(self, other):
        if not isinstance(other, Bicomplex):
            return NotImplemented
        return (self.field == other.field and self._cells == other._cells
                and all(self.vertical(*c) == other.vertical(*c) and self.horizontal(*c) == other.horizontal(*c)
                        for c in self.cells))

    __hash__ = None

    def __repr__(self):
        return "Bicomplex({}, {})".format(self.field.name, dict(sorted(self._cells.items())))


class BiMap:
    def __init__(self, source, target, maps=None):
        self.source = source
        self.target = target
        self.field = check_same_field(source.field, target.field)
        self._maps = {}
        for (i, j), m in (maps or {}).items():
            i, j = int(i), int(j)
            expected = (target.dim(i, j), source.dim(i, j))
            if m.shape != expected:
                raise DimensionMismatch("component ({}, {}) has shape {}, expected {}".format(
                    i, j, m.shape, expected))
            if m.rows and m.cols:
                self._maps[(i, j)] = m

    @property
    def cells(self):
        return sorted(set(self.source.cells) | set(self.target.cells))

    def component(self, i, j):
        m = self._maps.get((i, j))
        if m is None:
            return Matrix.zeros(self.field, self.target.dim(i, j), self.source.dim(i, j))
        return m

    def __eq__(self, other):
        if not isinstance(other, BiMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(self.component(*c) == other.component(*c) for c in self.cells))

    __hash__ = None

    def __repr__(self):
        return "BiMap({!r} -> {!r})".format(self.source, self.target)


def validate(A):
    found = []
    for i, j in A.cells:
        d0, d1 = A.vertical(i, j), A.horizontal(i, j)
        if not (A.vertical(i, j + 1) @ d0).is_zero():
            found.append("d0·d0 != 0 at ({}, {})".format(i, j))
        if not (A.horizontal(i - 1, j) @ d1).is_zero():
            found.append("d1·d1 != 0 at ({}, {})".format(i, j))
        if A.vertical(i - 1, j) @ d1 != A.horizontal(i, j + 1) @ d0:
            found.append("d0·d1 != d1·d0 at ({}, {})".format(i, j))
    return found


def validate_map(f):
    found = []
    A, B = f.source, f.target
    for i, j in A.cells:
        if f.component(i, j + 1) @ A.vertical(i, j) != B.vertical(i, j) @ f.component(i, j):
            found.append("map does not commute with d0 at ({}, {})".format(i, j))
        if f.component(i - 1, j) @ A.horizontal(i, j) != B.horizontal(i, j) @ f.component(i, j):
            found.append("map does not commute with d1 at ({}, {})".format(i, j))
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


def zero_bicomplex(field=QQ):
    return Bicomplex(field, {})


def unit_cell(i, j, field=QQ):
    """A single R in bidegree (i, j)."""
    return Bicomplex(field, {(i, j): 1})


def identity_bimap(A):
    return BiMap(A, A, {c: Matrix.identity(A.field, A.dim(*c)) for c in A.cells})


def zero_bimap(A, B):
    return BiMap(A, B)


def compose(g, f):
    return BiMap(f.source, g.target, {c: g.component(*c) @ f.component(*c) for c in f.cells})


def inverse_bimap(f):
    """The cellwise inverse of an isomorphism."""
    return BiMap(f.target, f.source, {c: inverse(f.component(*c)) for c in f.cells})


def is_iso(f):
    return all(f.component(*c).is_square() and rank(f.component(*c)) == f.component(*c).rows
               for c in f.cells)


def direct_sum(*bicomplexes):
    field = check_same_field(*[b.field for b in bicomplexes])
    cells = sorted(set(c for b in bicomplexes for c in b.cells))
    dims = {c: sum(b.dim(*c) for b in bicomplexes) for c in cells}
    d0, d1 = {}, {}
    for i, j in cells:
        d0[(i, j)] = block_matrix(field, [b.dim(i, j + 1) for b in bicomplexes], [b.dim(i, j) for b in bicomplexes],
                                  {(k, k): b.vertical(i, j) for k, b in enumerate(bicomplexes)})
        d1[(i, j)] = block_matrix(field, [b.dim(i - 1, j) for b in bicomplexes], [b.dim(i, j) for b in bicomplexes],
                                  {(k, k): b.horizontal(i, j) for k, b in enumerate(bicomplexes)})
    total = Bicomplex(field, dims, d0, d1)
    injections, projections = [], []
    for k, b in enumerate(bicomplexes):
        inj, proj = {}, {}
        for c in cells:
            sizes = [x.dim(*c) for x in bicomplexes]
            inj[c] = block_matrix(field, sizes, [b.dim(*c)], {(k, 0): Matrix.identity(field, b.dim(*c))})
            proj[c] = block_matrix(field, [b.dim(*c)], sizes, {(0, k): Matrix.identity(field, b.dim(*c))})
        injections.append(BiMap(b, total, inj))
        projections.append(BiMap(total, b, proj))
    return total, injections, projections


def restrict_cells(A, keep):
    """The bicomplex on the cells satisfying keep(i, j), with arrows between kept cells."""
    cells = {c: A.dim(*c) for c in A.cells if keep(*c)}
    d0 = {(i, j): A.vertical(i, j) for i, j in cells if (i, j + 1) in cells}
    d1 = {(i, j): A.horizontal(i, j) for i, j in cells if (i - 1, j) in cells}
    return Bicomplex(A.field, cells, d0, d1)


def truncate_columns(A, lo):
    """Quotient of A by its columns left of lo; returns (quotient, projection)."""
    Q = restrict_cells(A, lambda i, j: i >= lo)
    return Q, BiMap(A, Q, {c: Matrix.identity(A.field, Q.dim(*c)) for c in Q.cells})


# Suspension and loops

def _reindex(A, di, dj, sign0, sign1):
    cells = {(i + di, j + dj): A.dim(i, j) for i, j in A.cells}
    d0 = {(i + di, j + dj): A.vertical(i, j).scale(sign0) for i, j in A.cells}
    d1 = {(i + di, j + dj): A.horizontal(i, j).scale(sign1) for i, j in A.cells}
    return Bicomplex(A.field, cells, d0, d1)


def _sign(k):
    return -1 if k % 2 else 1


def _signs(r):
    return _sign(r + 1), _sign(r)


def suspension(A, r):
    """(Σ^rA)^{p,q} = A^{p-r,q-r+1} with d0 scaled by (-1)^{r+1} and d1 by (-1)^r."""
    s0, s1 = _signs(r)
    return _reindex(A, r, r - 1, s0, s1)


def loops(A, r):
    """(Ω^rA)^{p,q} = A^{p+r,q+r-1}, the inverse of suspension."""
    s0, s1 = _signs(r)
    return _reindex(A, -r, 1 - r, s0, s1)


def suspension_map(f, r):
    return BiMap(suspension(f.source, r), suspension(f.target, r),
                 {(i + r, j + r - 1): f.component(i, j) for i, j in f.cells})


def loops_map(f, r):
    return BiMap(loops(f.source, r), loops(f.target, r),
                 {(i - r, j - r + 1): f.component(i, j) for i, j in f.cells})


# Witness cycles and the spectral sequence

def _slots(A, r, p, q):
    """Cells (p-k, q-k) of a witness tuple with their offsets."""
    slots = []
    offset = 0
    for k in range(max(r, 1)):
        cell = (p - k, q - k)
        d = A.dim(*cell)
        slots.append((cell, offset, d))
        offset += d
    return slots, offset


def _split(vector, slots):
    return [tuple(vector[offset:offset + d]) for _, offset, d in slots]


def _join(parts):
    return tuple(x for part in parts for x in part)


def witness_cycles(A, r, p, q):
    """ZW_r^{p,q}(A) inside ⊕_k A^{p-k,q-k}."""
    if r < 0:
        raise ValueError("r must be non-negative, got {}".format(r))
    slots, total = _slots(A, r, p, q)
    if r == 0 or total == 0:
        return Subspace.full(A.field, total)
    blocks = {(0, 0): A.vertical(p, q)}
    for k in range(1, r):
        blocks[(k, k)] = A.vertical(p - k, q - k)
        blocks[(k, k - 1)] = -A.horizontal(p - k + 1, q - k + 1)
    system = block_matrix(A.field, [A.dim(p - k, q - k + 1) for k in range(r)],
                          [d for _, _, d in slots], blocks)
    return kernel_basis(system)


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _w_image(A, r, p, q, b, c, e):
    """w_r(b, c, e) as a vector of the (p, q) witness space.

    b is a witness tuple at (p+r-1, q+r-2) of length r-1, c lies in
    A^{p,q-1} and e is a witness tuple at (p-1, q-1) of length r-1; any of
    them may be None.
    """
    field = A.field
    slots, _ = _slots(A, r, p, q)
    parts = [tuple(field.zero for _ in range(d)) for _, _, d in slots]
    if b is not None and r >= 2:
        parts[0] = _add(parts[0], A.horizontal(p + 1, q).apply(b[r - 2]))
    if c is not None:
        parts[0] = _add(parts[0], A.vertical(p, q - 1).apply(c))
        if r >= 2:
            parts[1] = _add(parts[1], A.horizontal(p, q - 1).apply(c))
    if e is not None and r >= 2:
        for k in range(r - 1):
            parts[k + 1] = _add(parts[k + 1], e[k])
    return _join(parts)


def _standard_basis(field, n):
    return [tuple(field.one if i == k else field.zero for i in range(n)) for k in range(n)]


def witness_boundaries(A, r, p, q):
    """(dim BW_r, matrix of w_r: BW_r → witness space at (p, q))."""
    if r < 0:
        raise ValueError("r must be non-negative, got {}".format(r))
    field = A.field
    _, total = _slots(A, r, p, q)
    columns = []
    if r >= 1:
        if r >= 2:
            b_slots, _ = _slots(A, r - 1, p + r - 1, q + r - 2)
            for v in witness_cycles(A, r - 1, p + r - 1, q + r - 2).vectors():
                columns.append(_w_image(A, r, p, q, _split(v, b_slots), None, None))
        for c in _standard_basis(field, A.dim(p, q - 1)):
            columns.append(_w_image(A, r, p, q, None, c, None))
        if r >= 2:
            e_slots, _ = _slots(A, r - 1, p - 1, q - 1)
            for v in witness_cycles(A, r - 1, p - 1, q - 1).vectors():
                columns.append(_w_image(A, r, p, q, None, None, _split(v, e_slots)))
    w = Matrix.from_columns(field, total, columns)
    if not witness_cycles(A, r, p, q).contains(image(w)):
        raise InvariantViolation("w_{} leaves ZW_{} at ({}, {})".format(r, r, p, q))
    return len(columns), w


def _bidegree_window(r, *bicomplexes):
    ranges = [b.column_range() for b in bicomplexes if not b.is_zero()]
    if not ranges:
        return []
    lo = min(a for a, _ in ranges)
    hi = max(b for _, b in ranges)
    degrees = sorted(set(n for b in bicomplexes for n in b.total_degrees()))
    return [(p, p + n) for n in degrees for p in range(lo - r - 1, hi + r + 2)]


def page(A, r):
    """The r-page computed from witness cycles modulo w_r(BW_r)."""
    if r < 0:
        raise ValueError("r must be non-negative, got {}".format(r))
    if r in A._pages:
        return A._pages[r]
    field = A.field
    entries = {}
    for p, q in _bidegree_window(r, A):
        z = witness_cycles(A, r, p, q)
        if z.dim == 0:
            continue
        _, w = witness_boundaries(A, r, p, q)
        qt = quotient(z, image(w))
        if qt.dim:
            entries[(p, q)] = PageEntry(p, q, qt)
    singer.log_debug("Witness page %s: %s nonzero entries", r, len(entries))

    def push(entry, v):
        if r == 0:
            return A.vertical(entry.p, entry.q).apply(v)
        slots, _ = _slots(A, r, entry.p, entry.q)
        last = _split(v, slots)[r - 1]
        head = A.horizontal(entry.p - r + 1, entry.q - r + 1).apply(last)
        target_slots, _ = _slots(A, r, entry.p - r, entry.q - r + 1)
        parts = [head] + [tuple(field.zero for _ in range(d)) for _, _, d in target_slots[1:]]
        return _join(parts)

    table = _assemble_page(field, r, entries, push)
    A._pages[r] = table
    return table


def _slotwise(f, r, p, q, v):
    slots, _ = _slots(f.source, r, p, q)
    return _join(f.component(*cell).apply(part) for (cell, _, _), part in zip(slots, _split(v, slots)))


def page_map(f, r):
    def push(entry, v):
        return _slotwise(f, r, entry.p, entry.q, v)
    return _page_map(f.field, page(f.source, r), page(f.target, r), push)


def is_r_weq(f, r):
    return _invertible_everywhere(page_map(f, r + 1))


def is_r_acyclic(A, r):
    return page(A, r + 1).is_zero()


def page_injectivity_failures(f, k):
    return [key for key, m in page_map(f, k).items() if rank(m) != m.cols]


def witness_surjectivity_failures(f, k):
    """Bidegrees where ZW_k(f) is not surjective."""

    failures = []
    for p, q in _bidegree_window(k, f.source, f.target):
        zb = witness_cycles(f.target, k, p, q)
        if zb.dim == 0:
            continue
        za = witness_cycles(f.source, k, p, q)
        pushed = Subspace(f.field, zb.ambient_dim, [_slotwise(f, k, p, q, v) for v in za.vectors()])
        if pushed.dim < zb.dim:
            failures.append((p, q))
    return failures


def is_witness_surjective(f, k):
    return not witness_surjectivity_failures(f, k)


def lift_witness_cycle(f, r, p, q, y):
    """Lift y: 𝒵𝒲_r(p,q) → B through f: E → B, or None."""
    E = f.source
    z = witness_cycles(E, r, p, q)
    target = _evaluate(y, r, p, q)
    pushed = Matrix.from_columns(f.field, len(target), [_slotwise(f, r, p, q, v) for v in z.vectors()])
    coeffs = solve(pushed, target)
    if coeffs is None:
        return None
    return witness_cycle_map(E, r, p, q, z.basis.apply(coeffs))


# Representing objects

def _square(p, q, field):
    one = Matrix.identity(field, 1)
    cells = {(p, q): 1, (p, q + 1): 1, (p - 1, q): 1, (p - 1, q + 1): 1}
    return Bicomplex(field, cells,
                     d0={(p, q): one, (p - 1, q): one},
                     d1={(p, q): one, (p, q + 1): one})


def _staircase_cells(r, p, q):
    a_cells = [(p - k, q - k) for k in range(r)]
    b_cells = [(p - k - 1, q - k) for k in range(r)]
    return a_cells, b_cells


def rep_witness_cycle(r, p, q, field=QQ):
    """𝒵𝒲_r(p,q): the square for r = 0, a staircase of 2r cells otherwise."""
    if r == 0:
        return _square(p, q, field)
    one = Matrix.identity(field, 1)
    a_cells, b_cells = _staircase_cells(r, p, q)
    cells = {c: 1 for c in a_cells + b_cells}
    d1 = {a: one for a in a_cells}
    d0 = {a_cells[k + 1]: one for k in range(r - 1)}
    return Bicomplex(field, cells, d0, d1)


def _generator_cells(r, p, q):
    if r == 0:
        return [(p, q)]
    return _staircase_cells(r, p, q)[0]


def rep_witness_boundary(r, p, q, field=QQ):
    """ℬ𝒲_r(p,q), q being the bidegree one below the cycle it bounds."""
    if r == 0:
        return zero_bicomplex(field)
    if r == 1:
        return rep_witness_cycle(0, p, q, field)
    return direct_sum(rep_witness_cycle(r - 1, p + r - 1, q + r - 1, field),
                      rep_witness_cycle(0, p, q, field),
                      rep_witness_cycle(r - 1, p - 1, q, field))[0]


def witness_cycle_map(A, r, p, q, vector):
    """The map 𝒵𝒲_r(p,q) → A classifying a witness cycle given in slot coordinates."""
    field = A.field
    if not witness_cycles(A, r, p, q).contains_vector(vector):
        raise ValueError("vector is not an r-witness cycle at ({}, {})".format(p, q))
    source = rep_witness_cycle(r, p, q, field)
    slots, _ = _slots(A, r, p, q)
    images = witness_images(A, r, p, q, _split(vector, slots))
    maps = {c: Matrix.from_columns(field, A.dim(*c), [v]) for c, v in images.items()}
    return checked_map(BiMap(source, A, maps))


def witness_images(A, r, p, q, parts):
    """Images in A of every cell of 𝒵𝒲_r(p,q) once the generators go to `parts`."""
    images = {}
    if r == 0:
        x = parts[0]
        images[(p, q)] = x
        images[(p, q + 1)] = A.vertical(p, q).apply(x)
        images[(p - 1, q)] = A.horizontal(p, q).apply(x)
        images[(p - 1, q + 1)] = A.vertical(p - 1, q).apply(images[(p - 1, q)])
    else:
        a_cells, b_cells = _staircase_cells(r, p, q)
        for k in range(r):
            images[a_cells[k]] = parts[k]
            images[b_cells[k]] = A.horizontal(*a_cells[k]).apply(parts[k])
    return images


def _evaluate(h, r, p, q):
    """The witness tuple a map out of 𝒵𝒲_r(p,q) assigns to its generators."""
    one = (h.field.one,)
    return _join(h.component(*c).apply(one) for c in _generator_cells(r, p, q))


def phi(r, p, q, field=QQ):
    """φ_r: 𝒵𝒲_r(p,q) → ℬ𝒲_r(p,q-1), the universal w_r-image."""
    one = (field.one,)
    if r == 0:
        return BiMap(rep_witness_cycle(0, p, q, field), zero_bicomplex(field))
    if r == 1:
        target = rep_witness_boundary(1, p, q - 1, field)
        return witness_cycle_map(target, 1, p, q, _w_image(target, 1, p, q, None, one, None))
    target, injections, _ = direct_sum(rep_witness_cycle(r - 1, p + r - 1, q + r - 2, field),
                                       rep_witness_cycle(0, p, q - 1, field),
                                       rep_witness_cycle(r - 1, p - 1, q - 1, field))
    b = [injections[0].component(*cell).apply(one)
         for cell in _generator_cells(r - 1, p + r - 1, q + r - 2)]
    c = injections[1].component(p, q - 1).apply(one)
    e = [injections[2].component(*cell).apply(one)
         for cell in _generator_cells(r - 1, p - 1, q - 1)]
    return witness_cycle_map(target, r, p, q, _w_image(target, r, p, q, b, c, e))


def hom_space(X, A):
    """A basis of Hom(X, A) in bicomplexes."""
    field = check_same_field(X.field, A.field)
    blocks = {c: (A.dim(*c), X.dim(*c), None) for c in X.cells if A.dim(*c)}
    relations = []
    for i, j in X.cells:
        for step, dx, da in (((i, j + 1), X.vertical(i, j), A.vertical(i, j)),
                             ((i - 1, j), X.horizontal(i, j), A.horizontal(i, j))):
            rows = A.dim(*step)
            if not rows:
                continue
            terms = []
            if step in blocks:
                terms.append((None, step, dx))
            if (i, j) in blocks:
                terms.append((-da, (i, j), None))
            if terms:
                relations.append((terms, rows, X.dim(i, j)))
    homs = [BiMap(X, A, maps) for maps in solve_block_maps(field, blocks, relations)]
    return len(homs), homs


def page_dim_via_hom(A, r, p, q):
    """dim E_r^{p,q}(A) as Hom(𝒵𝒲_r, A) modulo the image of φ_r^*."""
    field = A.field
    dim_z, _ = hom_space(rep_witness_cycle(r, p, q, field), A)
    if r == 0:
        return dim_z
    ph = phi(r, p, q, field)
    _, homs = hom_space(ph.target, A)
    _, total = _slots(A, r, p, q)
    hit = Subspace(field, total, [_evaluate(compose(g, ph), r, p, q) for g in homs])
    return dim_z - hit.dim


# Tensor products and cones

def _tensor_layout(X, A, p, q):
    blocks = []
    offset = 0
    for i, j in X.cells:
        acell = (p - i, q - j)
        da = A.dim(*acell)
        if da == 0:
            continue
        size = X.dim(i, j) * da
        blocks.append(((i, j), acell, offset, size))
        offset += size
    return blocks, offset


def tensor(X, A):
    """X ⊗ A with d0(x⊗a) = d0x⊗a + (-1)^j x⊗d0a and d1(x⊗a) = d1x⊗a + (-1)^i x⊗d1a."""
    field = check_same_field(X.field, A.field)
    cells = sorted(set((i + k, j + l) for i, j in X.cells for k, l in A.cells))
    dims = {c: _tensor_layout(X, A, *c)[1] for c in cells}
    d0, d1 = {}, {}
    for p, q in cells:
        source, _ = _tensor_layout(X, A, p, q)
        for key, target_cell, step_x, step_a, dx, da in (
                (d0, (p, q + 1), (0, 1), (0, 1), X.vertical, A.vertical),
                (d1, (p - 1, q), (-1, 0), (-1, 0), X.horizontal, A.horizontal)):
            target, _ = _tensor_layout(X, A, *target_cell)
            index = {(xc, ac): t for t, (xc, ac, _, _) in enumerate(target)}
            blocks = {}
            for s, (xc, ac, _, _) in enumerate(source):
                i, j = xc
                moved_x = (i + step_x[0], j + step_x[1])
                t = index.get((moved_x, ac))
                if t is not None:
                    blocks[(t, s)] = kron(dx(i, j), Matrix.identity(field, A.dim(*ac)))
                moved_a = (ac[0] + step_a[0], ac[1] + step_a[1])
                t = index.get((xc, moved_a))
                if t is not None:
                    sign = _sign(j if key is d0 else i)
                    blocks[(t, s)] = kron(Matrix.identity(field, X.dim(i, j)), da(*ac)).scale(sign)
            key[(p, q)] = block_matrix(field, [b[3] for b in target], [b[3] for b in source], blocks)
    T = Bicomplex(field, dims, d0, d1)
    violations = validate(T)
    if violations:
        raise InvariantViolation("tensor product is not a bicomplex: {}".format("; ".join(violations)))
    return T


def tensor_maps(f, g):
    """f ⊗ g: X⊗A → Y⊗B."""
    source = tensor(f.source, g.source)
    target = tensor(f.target, g.target)
    field = f.field
    maps = {}
    for p, q in source.cells:
        s_layout, _ = _tensor_layout(f.source, g.source, p, q)
        t_layout, _ = _tensor_layout(f.target, g.target, p, q)
        index = {(xc, ac): t for t, (xc, ac, _, _) in enumerate(t_layout)}
        blocks = {}
        for s, (xc, ac, _, _) in enumerate(s_layout):
            t = index.get((xc, ac))
            if t is not None:
                blocks[(t, s)] = kron(f.component(*xc), g.component(*ac))
        maps[(p, q)] = block_matrix(field, [b[3] for b in t_layout], [b[3] for b in s_layout], blocks)
    return BiMap(source, target, maps)


def _cone_object(r, field):
    if r == 0:
        return Bicomplex(field, {(0, -1): 1, (0, 0): 1}, d0={(0, -1): Matrix.identity(field, 1)})
    return rep_witness_cycle(r, r, r - 1, field)


def _cone_top(r):
    return (0, -1) if r == 0 else (r, r - 1)


def cone(A, r):
    """C_r(A) = 𝒵𝒲_r(r,r-1) ⊗ A, and C_0(R^{0,0}) ⊗ A for r = 0."""
    return tensor(_cone_object(r, A.field), A)


def psi(A, r):
    """ψ_r = π ⊗ id_A: C_r(A) → Σ^rA, π projecting onto the top cell."""
    field = A.field
    X = _cone_object(r, field)
    top = _cone_top(r)
    line = unit_cell(*top, field=field)
    pi = BiMap(X, line, {top: Matrix.identity(field, 1)})
    product = tensor_maps(pi, identity_bimap(A))
    sigma = suspension(A, r)
    if product.target != sigma:
        raise InvariantViolation("R^{} ⊗ A differs from the suspension".format(top))
    return BiMap(product.source, sigma, {c: product.component(*c) for c in product.cells})


def nw(r, field=QQ):
    """𝒩𝒲_r(r,r-1): the staircase 𝒵𝒲_r(r,r-1) with its top cell deleted."""
    if r < 1:
        raise ValueError("nw needs r >= 1, got {}".format(r))
    top = _cone_top(r)
    return restrict_cells(rep_witness_cycle(r, r, r - 1, field), lambda i, j: (i, j) != top)


def nw_inclusion(r, field=QQ):
    """𝒩𝒲_r(r,r-1) → 𝒵𝒲_r(r,r-1)."""
    N = nw(r, field)
    return BiMap(N, rep_witness_cycle(r, r, r - 1, field), {c: Matrix.identity(field, 1) for c in N.cells})


def omega_i_inclusion(A, r):
    """Ω^r i ⊗ id_A: Ω^rA → Ω^r𝒩𝒲_r(r,r-1) ⊗ A, i including the (0,0) cell."""
    if r < 1:
        raise ValueError("omega_i_inclusion needs r >= 1; for r = 0 the pullback is Ω^0A itself")
    field = A.field
    i = BiMap(unit_cell(0, 0, field), nw(r, field), {(0, 0): Matrix.identity(field, 1)})
    product = tensor_maps(loops_map(i, r), identity_bimap(A))
    source = loops(A, r)
    if product.source != source:
        raise InvariantViolation("Ω^rR ⊗ A differs from Ω^rA")
    return BiMap(source, product.target, {c: product.component(*c) for c in product.cells})


# Kernels, cokernels, limits and colimits

def _subbicomplex(E, spaces):
    field = E.field
    bases = {c: s.basis for c, s in spaces.items() if s.dim}
    cells = {c: b.cols for c, b in bases.items()}
    d0, d1 = {}, {}
    for (i, j), basis in bases.items():
        for store, step, d in ((d0, (i, j + 1), E.vertical(i, j)), (d1, (i - 1, j), E.horizontal(i, j))):
            pushed = d @ basis
            if step not in bases:
                if not pushed.is_zero():
                    raise InvariantViolation("cell family not closed under the differentials at ({}, {})".format(i, j))
                continue
            solved = solve_matrix(bases[step], pushed)
            if solved is None:
                raise InvariantViolation("cell family not closed under the differentials at ({}, {})".format(i, j))
            store[(i, j)] = solved
    S = Bicomplex(field, cells, d0, d1)
    return S, BiMap(S, E, bases)


def _quotient_bicomplex(E, spaces):
    field = E.field
    projections, sections = {}, {}
    for c in E.cells:
        space = spaces.get(c, Subspace.zero(field, E.dim(*c)))
        q = quotient(Subspace.full(field, E.dim(*c)), space)
        if q.dim:
            projections[c] = q.projector
            sections[c] = q.section
    d0, d1 = {}, {}
    for (i, j), section in sections.items():
        if (i, j + 1) in projections:
            d0[(i, j)] = projections[(i, j + 1)] @ E.vertical(i, j) @ section
        if (i - 1, j) in projections:
            d1[(i, j)] = projections[(i - 1, j)] @ E.horizontal(i, j) @ section
    Q = Bicomplex(field, {c: s.cols for c, s in sections.items()}, d0, d1)
    return Q, BiMap(E, Q, projections)


def kernel(f):
    return _subbicomplex(f.source, {c: kernel_basis(f.component(*c)) for c in f.source.cells})


def cokernel(f):
    return _quotient_bicomplex(f.target, {c: image(f.component(*c)) for c in f.target.cells})


def is_injective(f):
    return all(rank(f.component(*c)) == f.source.dim(*c) for c in f.source.cells)


def is_effective_mono(f):
    """Injective with f ≅ ker(coker f); true for every monomorphism of bicomplexes."""
    if not is_injective(f):
        return False
    _, q = cokernel(f)
    K, k = kernel(q)
    maps = {}
    for c in f.source.cells:
        solved = solve_matrix(k.component(*c), f.component(*c))
        if solved is None:
            return False
        maps[c] = solved
    return is_iso(BiMap(f.source, K, maps))


def pullback(f, g):
    """Fiber product of f: A → X and g: B → X; returns (P, leg to A, leg to B)."""
    E, _, (proj_a, proj_b) = direct_sum(f.source, g.source)
    spaces = {c: kernel_basis(hstack(f.field, f.target.dim(*c), [f.component(*c), -g.component(*c)]))
              for c in E.cells}
    P, incl = _subbicomplex(E, spaces)
    return P, compose(proj_a, incl), compose(proj_b, incl)


def pushout(f, g):
    """Pushout of f: X → A and g: X → B; returns (P, leg from A, leg from B)."""
    E, (inj_a, inj_b), _ = direct_sum(f.target, g.target)
    X = f.source
    spaces = {c: image(vstack(f.field, X.dim(*c), [f.component(*c), -g.component(*c)])) for c in E.cells}
    P, q = _quotient_bicomplex(E, spaces)
    return P, compose(q, inj_a), compose(q, inj_b)


def direct_sum_map(f, g):
    S = direct_sum(f.source, g.source)[0]
    T = direct_sum(f.target, g.target)[0]
    return BiMap(S, T, {c: block_diag(f.field, [f.component(*c), g.component(*c)])
                        for c in sorted(set(S.cells) | set(T.cells))})
