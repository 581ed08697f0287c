"""Exact matrices and subspaces over the rationals or a prime field.

Every other module reduces its questions to rank, kernel, intersection,
preimage and quotient computations done here by Gaussian elimination.
"""
from fractions import Fraction


class FieldMismatch(Exception):
    """Scalars or matrices from different fields were combined."""


class DimensionMismatch(Exception):
    """Matrix or subspace shapes do not line up."""


class NotContained(Exception):
    """A quotient was requested by a space that is not a subspace."""


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Mod:
    """An integer modulo a prime p."""
    __slots__ = ("value", "p")

    def __init__(self, value, p):
        self.value = value % p
        self.p = p

    def _other(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldMismatch("Cannot combine Fp:{} with Fp:{}".format(self.p, other.p))
            return other.value
        if isinstance(other, bool):
            return NotImplemented
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            raise FieldMismatch("Cannot combine Fp:{} with a rational".format(self.p))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Mod(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Mod(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.value, self.p)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Mod(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero in Fp:{}".format(self.p))
        return Mod(self.value * pow(o, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Mod(o, self.p) / self

    def __neg__(self):
        return Mod(-self.value, self.p)

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return "Mod({}, {})".format(self.value, self.p)


class Field:
    """The coefficient field of a session: Q, or Fp for a prime p."""

    def __init__(self, characteristic=0):
        if characteristic != 0 and not _is_prime(characteristic):
            raise ValueError("Fp:{} is not a prime field".format(characteristic))
        self.characteristic = characteristic
        self.zero = self(0)
        self.one = self(1)

    @classmethod
    def parse(cls, text):
        """Parse `Q` or `Fp:N`."""
        text = str(text).strip()
        if text in ("Q", "QQ"):
            return cls(0)
        if text.startswith("Fp:"):
            try:
                return cls(int(text[3:]))
            except ValueError as e:
                raise ValueError("Bad field {!r}: {}".format(text, e))
        raise ValueError("Unknown field {!r}, expected Q or Fp:N".format(text))

    @property
    def name(self):
        if self.characteristic == 0:
            return "Q"
        return "Fp:{}".format(self.characteristic)

    def __call__(self, value):
        if self.characteristic == 0:
            if isinstance(value, Mod):
                raise FieldMismatch("Cannot read an Fp:{} scalar into Q".format(value.p))
            if isinstance(value, str):
                return Fraction(value.strip())
            return Fraction(value)
        p = self.characteristic
        if isinstance(value, Mod):
            if value.p != p:
                raise FieldMismatch("Cannot read an Fp:{} scalar into Fp:{}".format(value.p, p))
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            return Mod(value.numerator, p) / Mod(value.denominator, p)
        return Mod(int(value), p)

    def format(self, x):
        """Canonical text of a scalar: "a/b" or "a" for Q, an int for Fp."""
        if self.characteristic == 0:
            x = Fraction(x)
            if x.denominator == 1:
                return str(x.numerator)
            return "{}/{}".format(x.numerator, x.denominator)
        return int(x)

    def __eq__(self, other):
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))

    def __repr__(self):
        return "Field({})".format(self.name)


QQ = Field(0)


def check_same_field(*fields):
    first = fields[0]
    for f in fields[1:]:
        if f != first:
            raise FieldMismatch("Cannot combine {} with {}".format(first.name, f.name))
    return first


class Matrix:
    """Immutable dense matrix acting on column vectors."""
    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field, rows, cols, entries=None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if entries is None:
            zero = field.zero
            entries = tuple(tuple(zero for _ in range(cols)) for _ in range(rows))
        else:
            entries = tuple(tuple(field(x) for x in row) for row in entries)
            if len(entries) != rows or any(len(row) != cols for row in entries):
                raise DimensionMismatch("Entries do not form a {}x{} grid".format(rows, cols))
        self.entries = entries

    @classmethod
    def _trusted(cls, field, rows, cols, entries):
        m = cls.__new__(cls)
        m.field = field
        m.rows = rows
        m.cols = cols
        m.entries = tuple(tuple(row) for row in entries)
        return m

    @classmethod
    def from_rows(cls, field, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(field, len(rows), cols, rows)

    @classmethod
    def from_columns(cls, field, nrows, columns):
        columns = [tuple(c) for c in columns]
        for c in columns:
            if len(c) != nrows:
                raise DimensionMismatch("Column of length {} in a {}-row matrix".format(len(c), nrows))
        entries = [[field(columns[j][i]) for j in range(len(columns))] for i in range(nrows)]
        return cls._trusted(field, nrows, len(columns), entries)

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field, n):
        return cls._trusted(field, n, n,
                            [[field.one if i == j else field.zero for j in range(n)] for i in range(n)])

    @classmethod
    def selection(cls, field, n, indices):
        """The n x k matrix whose columns are the standard vectors e_i for i in indices."""
        indices = list(indices)
        return cls._trusted(field, n, len(indices),
                            [[field.one if i == k else field.zero for k in indices] for i in range(n)])

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_zero(self):
        return all(x == 0 for row in self.entries for x in row)

    def is_square(self):
        return self.rows == self.cols

    def transpose(self):
        return Matrix._trusted(self.field, self.cols, self.rows,
                               [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def apply(self, vector):
        if len(vector) != self.cols:
            raise DimensionMismatch("Vector of length {} against {} columns".format(len(vector), self.cols))
        zero = self.field.zero
        out = []
        for row in self.entries:
            s = zero
            for a, b in zip(row, vector):
                if a != 0 and b != 0:
                    s = s + a * b
            out.append(s)
        return tuple(out)

    def __matmul__(self, other):
        check_same_field(self.field, other.field)
        if self.cols != other.rows:
            raise DimensionMismatch("Cannot multiply {}x{} by {}x{}".format(
                self.rows, self.cols, other.rows, other.cols))
        zero = self.field.zero
        other_cols = other.columns()
        entries = []
        for row in self.entries:
            nz = [(k, a) for k, a in enumerate(row) if a != 0]
            out = []
            for col in other_cols:
                s = zero
                for k, a in nz:
                    b = col[k]
                    if b != 0:
                        s = s + a * b
                out.append(s)
            entries.append(out)
        return Matrix._trusted(self.field, self.rows, other.cols, entries)

    def _same_shape(self, other):
        check_same_field(self.field, other.field)
        if self.shape != other.shape:
            raise DimensionMismatch("Shapes {} and {} differ".format(self.shape, other.shape))

    def __add__(self, other):
        self._same_shape(other)
        return Matrix._trusted(self.field, self.rows, self.cols,
                               [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix._trusted(self.field, self.rows, self.cols,
                               [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return Matrix._trusted(self.field, self.rows, self.cols,
                               [[-a for a in r] for r in self.entries])

    def scale(self, c):
        c = self.field(c)
        return Matrix._trusted(self.field, self.rows, self.cols,
                               [[c * a for a in r] for r in self.entries])

    def submatrix(self, row_indices, col_indices):
        row_indices = list(row_indices)
        col_indices = list(col_indices)
        return Matrix._trusted(self.field, len(row_indices), len(col_indices),
                               [[self.entries[i][j] for j in col_indices] for i in row_indices])

    def to_lists(self):
        return [[self.field.format(x) for x in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and self.entries == other.entries)

    __hash__ = None

    def __repr__(self):
        return "Matrix({}x{}, {})".format(self.rows, self.cols, self.to_lists())


def hstack(field, rows, blocks):
    """Place blocks (all with `rows` rows) side by side."""
    entries = [[] for _ in range(rows)]
    cols = 0
    for b in blocks:
        check_same_field(field, b.field)
        if b.rows != rows:
            raise DimensionMismatch("hstack of a {}-row block into {} rows".format(b.rows, rows))
        for i in range(rows):
            entries[i].extend(b.entries[i])
        cols += b.cols
    return Matrix._trusted(field, rows, cols, entries)


def vstack(field, cols, blocks):
    """Place blocks (all with `cols` columns) on top of each other."""
    entries = []
    for b in blocks:
        check_same_field(field, b.field)
        if b.cols != cols:
            raise DimensionMismatch("vstack of a {}-column block into {} columns".format(b.cols, cols))
        entries.extend(b.entries)
    return Matrix._trusted(field, len(entries), cols, entries)


def block_matrix(field, row_sizes, col_sizes, blocks):
    """Assemble a matrix from a dict {(i, j): Matrix} of blocks; missing blocks are zero."""
    offsets_r = [0]
    for s in row_sizes:
        offsets_r.append(offsets_r[-1] + s)
    offsets_c = [0]
    for s in col_sizes:
        offsets_c.append(offsets_c[-1] + s)
    entries = [[field.zero] * offsets_c[-1] for _ in range(offsets_r[-1])]
    for (bi, bj), b in blocks.items():
        if b is None:
            continue
        if b.shape != (row_sizes[bi], col_sizes[bj]):
            raise DimensionMismatch("Block ({}, {}) has shape {}, expected {}".format(
                bi, bj, b.shape, (row_sizes[bi], col_sizes[bj])))
        for i in range(b.rows):
            row = entries[offsets_r[bi] + i]
            for j in range(b.cols):
                row[offsets_c[bj] + j] = b.entries[i][j]
    return Matrix._trusted(field, offsets_r[-1], offsets_c[-1], entries)


def block_diag(field, blocks):
    return block_matrix(field, [b.rows for b in blocks], [b.cols for b in blocks],
                        {(k, k): b for k, b in enumerate(blocks)})


def kron(a, b):
    field = check_same_field(a.field, b.field)
    entries = []
    for i in range(a.rows):
        for k in range(b.rows):
            entries.append([a.entries[i][j] * b.entries[k][l]
                            for j in range(a.cols) for l in range(b.cols)])
    return Matrix._trusted(field, a.rows * b.rows, a.cols * b.cols, entries)


def row_reduce(field, rows, ncols, limit=None):
    """Reduced row echelon form of a list of rows.

    Pivots are searched left to right among the first `limit` columns and
    chosen as the first nonzero entry. Returns (reduced rows, pivot columns);
    the first len(pivots) rows carry the pivots and the rest are the
    remaining rows after elimination.
    """
    if limit is None:
        limit = ncols
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(limit):
        if r == len(m):
            break
        pivot = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = field.one / m[r][c]
        m[r] = [x * inv for x in m[r]]
        pivot_row = m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], pivot_row)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(m):
    _, pivots = row_reduce(m.field, m.entries, m.cols)
    return len(pivots)


def is_invertible(m):
    return m.is_square() and rank(m) == m.rows


def solve_matrix(m, rhs):
    """Some X with m @ X == rhs, or None when no solution exists."""
    field = check_same_field(m.field, rhs.field)
    if m.rows != rhs.rows:
        raise DimensionMismatch("Cannot solve {}x{} against {} rows".format(m.rows, m.cols, rhs.rows))
    augmented = [list(a) + list(b) for a, b in zip(m.entries, rhs.entries)]
    reduced, pivots = row_reduce(field, augmented, m.cols + rhs.cols, limit=m.cols)
    for row in reduced[len(pivots):]:
        if any(x != 0 for x in row[m.cols:]):
            return None
    entries = [[field.zero] * rhs.cols for _ in range(m.cols)]
    for k, c in enumerate(pivots):
        entries[c] = list(reduced[k][m.cols:])
    return Matrix._trusted(field, m.cols, rhs.cols, entries)


def solve(m, b):
    """A particular solution x of m·x = b, or None."""
    x = solve_matrix(m, Matrix.from_columns(m.field, m.rows, [b]))
    if x is None:
        return None
    return x.column(0)


def inverse(m):
    if not m.is_square():
        raise DimensionMismatch("Cannot invert a {}x{} matrix".format(m.rows, m.cols))
    if rank(m) != m.rows:
        raise ZeroDivisionError("Matrix is singular")
    return solve_matrix(m, Matrix.identity(m.field, m.rows))


class Subspace:
    """A subspace of k^ambient_dim with its canonical reduced basis.

    The basis vectors are the nonzero rows of the reduced row echelon form of
    any spanning set, so two equal spans get identical bases.
    """
    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field, ambient_dim, vectors=()):
        self.field = field
        self.ambient_dim = ambient_dim
        vectors = [tuple(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch("Vector of length {} in ambient dimension {}".format(
                    len(v), ambient_dim))
        reduced, pivots = row_reduce(field, vectors, ambient_dim)
        self.pivots = tuple(pivots)
        self.basis = Matrix.from_columns(field, ambient_dim, reduced[:len(pivots)])

    @classmethod
    def zero(cls, field, n):
        return cls(field, n)

    @classmethod
    def full(cls, field, n):
        return cls.coordinate(field, n, range(n))

    @classmethod
    def coordinate(cls, field, n, indices):
        """Span of the standard vectors e_i, i in indices."""
        indices = sorted(set(indices))
        s = cls.__new__(cls)
        s.field = field
        s.ambient_dim = n
        s.pivots = tuple(indices)
        s.basis = Matrix.selection(field, n, indices)
        return s

    @property
    def dim(self):
        return len(self.pivots)

    def vectors(self):
        return self.basis.columns()

    def _residue(self, v):
        v = list(v)
        for k, c in enumerate(self.pivots):
            coeff = v[c]
            if coeff != 0:
                col = self.basis.column(k)
                v = [a - coeff * b for a, b in zip(v, col)]
        return v

    def contains_vector(self, v):
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("Vector of length {} in ambient dimension {}".format(
                len(v), self.ambient_dim))
        return all(x == 0 for x in self._residue(v))

    def contains(self, other):
        """True iff other ⊆ self."""
        self._check_ambient(other)
        return all(self.contains_vector(v) for v in other.vectors())

    def coordinates(self, v):
        """Coordinates of v in the canonical basis; v must lie in the span."""
        if not self.contains_vector(v):
            raise NotContained("Vector does not lie in the subspace")
        return tuple(self.field(v[c]) for c in self.pivots)

    def _check_ambient(self, other):
        check_same_field(self.field, other.field)
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("Ambient dimensions {} and {} differ".format(
                self.ambient_dim, other.ambient_dim))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots and self.contains(other) and other.contains(self))

    __hash__ = None

    def __repr__(self):
        return "Subspace(dim={}, ambient={})".format(self.dim, self.ambient_dim)


def kernel_basis(m):
    reduced, pivots = row_reduce(m.field, m.entries, m.cols)
    pivot_set = set(pivots)
    vectors = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [m.field.zero] * m.cols
        v[free] = m.field.one
        for k, c in enumerate(pivots):
            v[c] = -reduced[k][free]
        vectors.append(v)
    return Subspace(m.field, m.cols, vectors)


def image(m, u=None):
    """m(u) as a subspace of the codomain; u defaults to the whole domain."""
    if u is None:
        return Subspace(m.field, m.rows, m.columns())
    if u.ambient_dim != m.cols:
        raise DimensionMismatch("Subspace of dimension {} fed to {} columns".format(u.ambient_dim, m.cols))
    return Subspace(m.field, m.rows, [m.apply(v) for v in u.vectors()])


def subspace_sum(u, v):
    u._check_ambient(v)
    return Subspace(u.field, u.ambient_dim, u.vectors() + v.vectors())


def intersect(u, v):
    u._check_ambient(v)
    field = u.field
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(field, u.ambient_dim)
    system = hstack(field, u.ambient_dim, [u.basis, -v.basis])
    kernel = kernel_basis(system)
    return Subspace(field, u.ambient_dim,
                    [u.basis.apply(x[:u.dim]) for x in kernel.vectors()])


def preimage(m, v):
    if v.ambient_dim != m.rows:
        raise DimensionMismatch("Subspace of dimension {} against {} rows".format(v.ambient_dim, m.rows))
    check_same_field(m.field, v.field)
    system = hstack(m.field, m.rows, [m, -v.basis])
    kernel = kernel_basis(system)
    return Subspace(m.field, m.cols, [x[:m.cols] for x in kernel.vectors()])


class Quotient:
    """u/w with a chosen complement.

    `projector` maps u-coordinates to quotient coordinates and `section`
    maps quotient coordinates back to u-coordinates, so that
    projector @ section is the identity.
    """

    def __init__(self, u, w, projector, section):
        self.u = u
        self.w = w
        self.projector = projector
        self.section = section

    @property
    def dim(self):
        return self.projector.rows

    def representatives(self):
        """Ambient vectors representing the quotient basis."""
        return [self.u.basis.apply(self.section.column(j)) for j in range(self.dim)]

    def representative_matrix(self):
        return self.u.basis @ self.section

    def classify(self, v):
        """Quotient coordinates of an ambient vector lying in u."""
        return self.projector.apply(self.u.coordinates(v))


def quotient(u, w):
    if not u.contains(w):
        raise NotContained("Quotient by a subspace that is not contained")
    field = u.field
    coords = [u.coordinates(v) for v in w.vectors()]
    _, pivots = row_reduce(field, coords, u.dim)
    pivot_set = set(pivots)
    free = [j for j in range(u.dim) if j not in pivot_set]
    complement = Matrix.selection(field, u.dim, free)
    change = hstack(field, u.dim, [Matrix.from_columns(field, u.dim, coords), complement])
    inv = inverse(change)
    projector = inv.submatrix(range(w.dim, u.dim), range(u.dim))
    return Quotient(u, w, projector, complement)


def adapted_basis(field, dim, levels):
    """Basis of k^dim adapted to an increasing family of subspaces.

    `levels` is a sequence of (weight, Subspace) in increasing weight whose
    last member is the whole space. Each level's canonical vectors are
    reduced against the vectors chosen so far; survivors get that level's
    weight. Returns (basis matrix, weights), columns sorted by pivot.
    """
    chosen = []
    for weight, space in levels:
        for v in space.vectors():
            v = list(v)
            for pivot, c, _ in chosen:
                coeff = v[pivot]
                if coeff != 0:
                    v = [a - coeff * b for a, b in zip(v, c)]
            lead = next((i for i, x in enumerate(v) if x != 0), None)
            if lead is None:
                continue
            inv = field.one / v[lead]
            v = [x * inv for x in v]
            chosen.append((lead, v, weight))
            chosen.sort(key=lambda item: item[0])
    if len(chosen) != dim:
        raise DimensionMismatch("Filtration levels span {} of {} dimensions".format(len(chosen), dim))
    basis = Matrix.from_columns(field, dim, [c for _, c, _ in chosen])
    return basis, [w for _, _, w in chosen]


def solve_block_maps(field, blocks, relations):
    """Basis of the families of matrices satisfying linear relations.

    `blocks` maps a key to (rows, cols, allowed) where allowed(i, j) says
    whether entry (i, j) may be nonzero (None allows every entry).
    `relations` is a list of (terms, rows, cols); each term is
    (left, key, right) and the relation reads sum(left @ F[key] @ right) == 0,
    with None standing for an identity factor.
    """
    index = {}
    layout = []
    for key, (rows, cols, allowed) in blocks.items():
        for i in range(rows):
            for j in range(cols):
                if allowed is None or allowed(i, j):
                    index[(key, i, j)] = len(layout)
                    layout.append((key, i, j))
    equations = []
    for terms, rows, cols in relations:
        for a in range(rows):
            for b in range(cols):
                eq = [field.zero] * len(layout)
                touched = False
                for left, key, right in terms:
                    krows, kcols, _ = blocks[key]
                    lefts = [(a, field.one)] if left is None else \
                        [(i, left[a, i]) for i in range(krows) if left[a, i] != 0]
                    rights = [(b, field.one)] if right is None else \
                        [(j, right[j, b]) for j in range(kcols) if right[j, b] != 0]
                    for i, lc in lefts:
                        for j, rc in rights:
                            var = index.get((key, i, j))
                            if var is not None:
                                eq[var] = eq[var] + lc * rc
                                touched = True
                if touched:
                    equations.append(eq)
    system = Matrix._trusted(field, len(equations), len(layout), equations)
    solutions = []
    for v in kernel_basis(system).vectors():
        entries = {key: [[field.zero] * cols for _ in range(rows)]
                   for key, (rows, cols, _) in blocks.items()}
        for var, x in enumerate(v):
            if x != 0:
                key, i, j = layout[var]
                entries[key][i][j] = x
        solutions.append({key: Matrix._trusted(field, blocks[key][0], blocks[key][1], e)
                          for key, e in entries.items()})
    return solutions
