"""S-model structure predicates on filtered complexes and bicomplexes, their
generating (acyclic) cofibrations, and executable versions of the stability
and left properness arguments.

Fibrations are the maps surjective on s-cycles (s-witness cycles for
bicomplexes) for every s in S; weak equivalences are (max S)-quasi
isomorphisms.
"""
from functools import reduce

import singer

from spectral_models import bicomplex, filtered
from spectral_models.bicomplex import BiMap
from spectral_models.filtered import ChainMap, _filtration_violations
from spectral_models.linalg import QQ, Matrix, block_matrix, inverse, is_invertible, solve_matrix
from spectral_models.report import FAIL, PASS, bidegrees, overall, run_check


FILTERED = "filtered"
BICOMPLEX = "bicomplex"
FLAVORS = (FILTERED, BICOMPLEX)


class FlavorMismatch(Exception):
    """A morphism and an S-set (or two morphisms) belong to different categories."""


class PreconditionFailed(Exception):
    """The input to a harness does not satisfy its hypotheses."""


class SSet:
    """A finite nonempty set of naturals indexing a model structure."""

    def __init__(self, elements, flavor=FILTERED):
        values = frozenset(int(v) for v in elements)
        if not values:
            raise ValueError("S must be nonempty")
        if min(values) < 0:
            raise ValueError("S must contain naturals only, got {}".format(sorted(values)))
        if flavor not in FLAVORS:
            raise ValueError("unknown flavor {}".format(flavor))
        if flavor == BICOMPLEX and 0 not in values:
            raise ValueError("bicomplex S-sets must contain 0, got {}".format(sorted(values)))
        self.elements = values
        self.flavor = flavor

    @classmethod
    def parse(cls, text, flavor=FILTERED):
        try:
            values = [int(v) for v in str(text).split(",") if v.strip()]
        except ValueError:
            raise ValueError("S-set must be a comma separated list of naturals, got {!r}".format(text))
        return cls(values, flavor)

    @property
    def r(self):
        return max(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __contains__(self, s):
        return s in self.elements

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        if not isinstance(other, SSet):
            return NotImplemented
        return self.elements == other.elements and self.flavor == other.flavor

    __hash__ = None

    def to_list(self):
        return sorted(self.elements)

    def __repr__(self):
        return "SSet({}, {})".format(self.to_list(), self.flavor)


def flavor_of(f):
    if isinstance(f, ChainMap):
        return FILTERED
    if isinstance(f, BiMap):
        return BICOMPLEX
    raise TypeError("expected a ChainMap or a BiMap, got {}".format(type(f).__name__))


def _require_flavor(f, S):
    flavor = flavor_of(f)
    if flavor != S.flavor:
        raise FlavorMismatch("{} morphism checked against a {} S-set".format(flavor, S.flavor))
    return flavor


def _module(flavor):
    return filtered if flavor == FILTERED else bicomplex


def _surjectivity_failures(f, s):
    if flavor_of(f) == FILTERED:
        return filtered.cycle_surjectivity_failures(f, s)
    return bicomplex.witness_surjectivity_failures(f, s)


def _injectivity_failures(f, k):
    return _module(flavor_of(f)).page_injectivity_failures(f, k)


def _is_r_weq(f, r):
    return _module(flavor_of(f)).is_r_weq(f, r)


# Fibrations

def fibration_failures(f, S):
    """{s: bidegrees where Z_s(f), or ZW_s(f), is not surjective}, only failing s."""
    _require_flavor(f, S)
    failures = {}
    for s in S:
        found = _surjectivity_failures(f, s)
        if found:
            failures[s] = found
    return failures


def is_fibration(f, S):
    return not fibration_failures(f, S)


def is_acyclic_fibration(f, S):
    return is_fibration(f, S) and _is_r_weq(f, S.r)


# Generating sets

class Generator:
    """A generating cofibration: φ_{r+1} at (p, n), or 0 → 𝒵_s(p, n)."""

    PHI = "phi"
    ZERO = "zero"

    def __init__(self, family, s, p, n, morphism):
        self.family = family
        self.s = s
        self.p = p
        self.n = n
        self.morphism = morphism

    def to_dict(self):
        return {"family": self.family, "s": self.s, "p": self.p, "n": self.n}

    def __repr__(self):
        return "Generator({family}, s={s}, p={p}, n={n})".format(**self.to_dict())


def generator(S, family, p, n, s=None, field=QQ):
    """The generating cofibration of the given family at (p, n) for S's flavor."""
    if family == Generator.PHI:
        s = S.r + 1
        if S.flavor == FILTERED:
            return Generator(family, s, p, n, filtered.phi(s, p, n, field))
        return Generator(family, s, p, n, bicomplex.phi(s, p, p + n, field))
    if family == Generator.ZERO:
        s = S.r if s is None else s
        if s not in S:
            raise ValueError("0 → 𝒵_{} is not a generator for S = {}".format(s, S.to_list()))
        if S.flavor == FILTERED:
            morphism = filtered.zero_map(filtered.zero_complex(field), filtered.rep_cycle(s, p, n, field))
        else:
            morphism = bicomplex.zero_bimap(bicomplex.zero_bicomplex(field),
                                            bicomplex.rep_witness_cycle(s, p, p + n, field))
        return Generator(family, s, p, n, morphism)
    raise ValueError("unknown generator family {}".format(family))


def generating_sets(S, points, field=QQ):
    """(I_S, J_S) over the (p, n) in points.

    J_S holds 0 → 𝒵_s(p, n) for s ∈ S; I_S holds φ_{r+1} together with J_S.
    For bicomplexes the 0 → 𝒵𝒲_0 family is already the s = 0 member of J_S.
    """
    points = sorted(set(points))
    if not points:
        raise ValueError("generating sets need at least one (p, n)")
    acyclic = [generator(S, Generator.ZERO, p, n, s, field) for s in S for p, n in points]
    cofibrations = [generator(S, Generator.PHI, p, n, field=field) for p, n in points] + acyclic
    singer.log_debug("Generating sets for S=%s: |I_S|=%s |J_S|=%s", S.to_list(), len(cofibrations), len(acyclic))
    return cofibrations, acyclic


def check_lifting(gen, q):
    """Lift 0 → X against the fibration q for every map X → target of q.

    gen must be of the 0 → 𝒵_s family; every basis element y of Hom(X, B)
    is lifted to E and the lift is checked to satisfy q∘lift == y.
    """
    if gen.family != Generator.ZERO:
        raise ValueError("constructive lifts exist only for the 0 → 𝒵_s family")
    X = gen.morphism.target
    flavor = flavor_of(q)
    if flavor_of(gen.morphism) != flavor:
        raise FlavorMismatch("{} generator lifted against a {} map".format(flavor_of(gen.morphism), flavor))
    module = _module(flavor)
    _, homs = module.hom_space(X, q.target)
    failures = []
    for index, y in enumerate(homs):
        if flavor == FILTERED:
            lift = filtered.lift_cycle(q, gen.s, gen.p, gen.n, y)
        else:
            lift = bicomplex.lift_witness_cycle(q, gen.s, gen.p, gen.p + gen.n, y)
        if lift is None or module.compose(q, lift) != y:
            failures.append(index)
    return {"check": "lifting", "generator": gen.to_dict(), "homs": len(homs),
            "status": PASS if not failures else FAIL, "failures": failures}


# Separating morphisms

def assembled_gamma(s, points, field=QQ):
    """⊕ γ_s(p, n) over the (p, n) in points."""
    maps = [filtered.gamma_morphism(s, p, n, field) for p, n in sorted(set(points))]
    if not maps:
        raise ValueError("gamma assembly needs at least one (p, n)")
    return reduce(filtered.direct_sum_map, maps)


def separation_profile(s, ks=None, points=((0, 0),), field=QQ):
    """The k for which the assembled γ_s is, and is not, Z_k-surjective."""
    ks = range(0, s + 4) if ks is None else ks
    g = assembled_gamma(s, points, field)
    surjective, failing = [], []
    for k in ks:
        (surjective if filtered.is_cycle_surjective(g, k) else failing).append(k)
    return {"check": "separation", "s": s, "points": [list(x) for x in sorted(set(points))],
            "surjective": surjective, "failing": failing,
            "status": PASS if failing == [s] else FAIL}


# Stability

def _filtered_iso_failure(f):
    """The first degree where f is not a filtered isomorphism, or None."""
    for n in f.degrees:
        m = f.map(n)
        if not is_invertible(m):
            return n
        if _filtration_violations(inverse(m), f.source.weights(n), f.target.weights(n), "inverse"):
            return n
    return None


def _solve_through(leg, g):
    """c with leg∘c == g degreewise (cellwise), or (None, location)."""
    if flavor_of(g) == FILTERED:
        maps = {}
        for n in g.source.degrees:
            c = solve_matrix(leg.map(n), g.map(n))
            if c is None:
                return None, n
            maps[n] = c
        return ChainMap(g.source, leg.source, maps), None
    maps = {}
    for cell in g.source.cells:
        c = solve_matrix(leg.component(*cell), g.component(*cell))
        if c is None:
            return None, list(cell)
        maps[cell] = c
    return BiMap(g.source, leg.source, maps), None


def stability_check_filtered(A, r):
    """The pullback of π_1: Ω^rC_r(id_A) → A along 0 → A is Ω^rA."""
    field = A.field
    pi = filtered.omega_cone_fibration(A, r)
    _, leg, _ = filtered.pullback(pi, filtered.zero_map(filtered.zero_complex(field), A))
    loops = filtered.loops(A, r)
    inclusion = ChainMap(loops, pi.source,
                         {n: block_matrix(field, [A.dim(n), A.dim(n - 1)], [A.dim(n - 1)],
                                        {(1, 0): Matrix.identity(field, A.dim(n - 1))})
                          for n in loops.degrees})

    def source_acyclic():
        return filtered.is_r_acyclic(pi.source, r)

    def inclusion_is_kernel():
        return filtered.validate_map(inclusion) == [] and filtered.compose(pi, inclusion) == filtered.zero_map(loops, A)

    def pullback_is_loops():
        comparison, degree = _solve_through(leg, inclusion)
        if comparison is None:
            return False, {"degree": degree, "reason": "no factorization through the pullback"}
        degree = _filtered_iso_failure(comparison)
        if degree is not None:
            return False, {"degree": degree, "reason": "comparison is not a filtered isomorphism"}
        return True

    checks = [run_check("source_r_acyclic", source_acyclic),
              run_check("inclusion_is_kernel", inclusion_is_kernel),
              run_check("pullback_is_loops", pullback_is_loops)]
    return {"check": "stability_filtered", "r": r, "status": overall(checks), "checks": checks}


def stability_check_bicomplex(A, r):
    """The pullback of Ω^rψ_r along 0 → A, and Ω^r i ⊗ id_A a 1-quasi isomorphism."""
    field = A.field
    omega_psi = bicomplex.loops_map(bicomplex.psi(A, r), r)
    zero = bicomplex.zero_bimap(bicomplex.zero_bicomplex(field), omega_psi.target)
    P, leg, _ = bicomplex.pullback(omega_psi, zero)

    if r == 0:
        def pullback_is_loops():
            return P == bicomplex.loops(A, 0), {"pullback": bidegrees(P.cells)}

        checks = [run_check("pullback_is_loops", pullback_is_loops)]
        return {"check": "stability_bicomplex", "r": r, "status": overall(checks), "checks": checks}

    product = bicomplex.tensor_maps(bicomplex.loops_map(bicomplex.nw_inclusion(r, field), r),
                                    bicomplex.identity_bimap(A))

    def loops_commutes_with_tensor():
        return product.target == omega_psi.source

    def pullback_is_nw_tensor():
        inclusion = BiMap(product.source, omega_psi.source,
                          {c: product.component(*c) for c in product.cells})
        comparison, cell = _solve_through(leg, inclusion)
        if comparison is None:
            return False, {"cell": cell, "reason": "no factorization through the pullback"}
        return bicomplex.is_iso(comparison)

    def omega_i_is_1_weq():
        return bicomplex.is_r_weq(bicomplex.omega_i_inclusion(A, r), 1)

    checks = [run_check("loops_commutes_with_tensor", loops_commutes_with_tensor),
              run_check("pullback_is_nw_tensor", pullback_is_nw_tensor),
              run_check("omega_i_is_1_weq", omega_i_is_1_weq)]
    return {"check": "stability_bicomplex", "r": r, "status": overall(checks), "checks": checks}


# Left properness

def _attaching_map(E, gen, attach):
    """X → E for the generator's source X: an (r+1)-cycle of E, or zero."""
    flavor = flavor_of(gen.morphism)
    X = gen.morphism.source
    if gen.family == Generator.ZERO:
        if flavor == FILTERED:
            return filtered.zero_map(X, E)
        return bicomplex.zero_bimap(X, E)
    if flavor == FILTERED:
        z = filtered.cycles(E, gen.s, gen.p, gen.n)
    else:
        z = bicomplex.witness_cycles(E, gen.s, gen.p, gen.p + gen.n)
    if attach is None:
        vectors = z.vectors()
        attach = vectors[0] if vectors else tuple(E.field.zero for _ in range(z.ambient_dim))
    if flavor == FILTERED:
        return filtered.cycle_map(E, gen.s, gen.p, gen.n, tuple(attach))
    return bicomplex.witness_cycle_map(E, gen.s, gen.p, gen.p + gen.n, tuple(attach))


def double_pushout(pi, gen, attach=None):
    """A' = A ⊔_X Y along the generator and π': A' → B' = B ⊔_A A'.

    Returns (f: A → A', π').
    """
    module = _module(flavor_of(pi))
    h = _attaching_map(pi.source, gen, attach)
    _, f, _ = module.pushout(h, gen.morphism)
    _, _, pi_prime = module.pushout(pi, f)
    return f, pi_prime


def properness_harness(pi, S, cof_index, family=Generator.PHI, s=None, attach=None):
    """Push an S-acyclic fibration out along a generating cofibration and
    check that the result is again one, through the intermediate claims.
    """
    flavor = _require_flavor(pi, S)
    if not is_acyclic_fibration(pi, S):
        raise PreconditionFailed("map is not an S-acyclic fibration for S = {}".format(S.to_list()))
    p, n = cof_index
    gen = generator(S, family, p, n, s, pi.field)
    module = _module(flavor)
    r = S.r
    report = {"check": "properness", "flavor": flavor, "S": S.to_list(), "cofibration": gen.to_dict()}

    try:
        f, pi_prime = double_pushout(pi, gen, attach)
    except Exception as e:
        singer.log_warning("Double pushout failed for %s: %s", gen, e)
        checks = [{"check": "double_pushout", "status": FAIL, "error": "{}: {}".format(type(e).__name__, e)}]
        report.update({"status": FAIL, "checks": checks})
        return report

    transfer_bound = r + 1 if flavor == BICOMPLEX else r

    def z_s_transfer():
        failing = {}
        for s_ in S:
            if s_ <= transfer_bound:
                found = _surjectivity_failures(pi_prime, s_)
                if found:
                    failing[str(s_)] = bidegrees(found)
        return not failing, {"failures": failing} if failing else None

    def z_r1_surjective():
        found = _surjectivity_failures(pi_prime, r + 1)
        return not found, {"failures": bidegrees(found)} if found else None

    def kernel_equal():
        K, k = module.kernel(pi)
        _, k_prime = module.kernel(pi_prime)
        comparison, where = _solve_through(k_prime, module.compose(f, k))
        if comparison is None:
            return False, {"at": where, "reason": "ker π does not land in ker π'"}
        if flavor == FILTERED:
            degree = _filtered_iso_failure(comparison)
            return degree is None, {"degree": degree} if degree is not None else None
        return bicomplex.is_iso(comparison)

    def e_r1_injective():
        found = _injectivity_failures(pi_prime, r + 1)
        return not found, {"failures": bidegrees(found)} if found else None

    def acyclic_fibration():
        return is_acyclic_fibration(pi_prime, S)

    checks = [run_check("z_s_transfer", z_s_transfer),
              run_check("z_r1_surjective", z_r1_surjective),
              run_check("kernel_equal", kernel_equal),
              run_check("e_r1_injective", e_r1_injective),
              run_check("acyclic_fibration", acyclic_fibration)]
    report.update({"status": overall(checks), "checks": checks})
    if report["status"] == FAIL:
        singer.log_warning("Properness finding for S=%s at %s", S.to_list(), gen)
    return report
