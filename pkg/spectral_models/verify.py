"""Seeded random instances and the verification suites behind `verify`.

Every case draws its instances from random.Random("<seed>:<suite>:<case>"),
so a report depends on the seed and the case count only. Cases run on a
joblib pool bounded by --jobs; results are kept in case order.
"""
import random
from fractions import Fraction

import pendulum
import singer
from joblib import Parallel, cpu_count, delayed

from spectral_models import bicomplex, codec, filtered, lattice, model_check, tot
from spectral_models.bicomplex import BiMap, Bicomplex
from spectral_models.filtered import ChainMap, FilteredComplex
from spectral_models.linalg import Matrix, inverse
from spectral_models.model_check import BICOMPLEX, FILTERED, Generator, SSet
from spectral_models.report import FAIL, PASS, overall, run_check


DIM_MAX = 4
DEGREE_RANGE = (-3, 3)
WEIGHT_RANGE = (-3, 3)
R_MAX = 4
ENTRY_BOUND = 3

SUITES = ("pages", "adjunction", "stability", "properness", "lattice")

# (p, n) grid of the fixture checks on representing cycles.
GRID = [(p, n) for p in (-1, 0, 1) for n in (-1, 0, 1)]


def instance_rng(seed, suite, index):
    return random.Random("{}:{}:{}".format(seed, suite, index))


# Generators

def random_scalar(rng, field, nonzero=False):
    while True:
        numerator = rng.randint(-ENTRY_BOUND, ENTRY_BOUND)
        if field.characteristic == 0:
            x = field(Fraction(numerator, rng.randint(1, ENTRY_BOUND)))
        else:
            x = field(numerator)
        if x or not nonzero:
            return x


def _triangular(rng, field, order):
    """A random invertible matrix, upper triangular in the given index order."""
    size = len(order)
    rank_of = {k: a for a, k in enumerate(order)}
    entries = [[field.zero] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            if i == j:
                entries[i][j] = random_scalar(rng, field, nonzero=True)
            elif rank_of[i] < rank_of[j]:
                entries[i][j] = random_scalar(rng, field)
    return Matrix(field, size, size, entries)


def _fits(dims, extra):
    return all(dims.get(k, 0) + d <= DIM_MAX for k, d in extra.items())


def random_filtered_complex(rng, field, max_pieces=3):
    """A direct sum of single generators and pairs u ↦ v, in a random adapted basis."""
    lo, hi = WEIGHT_RANGE
    pieces, dims = [], {}
    for _ in range(rng.randint(1, max_pieces)):
        if rng.random() < 0.4:
            n = rng.randint(*DEGREE_RANGE)
            piece = filtered.pure(rng.randint(lo, hi), n, field)
        else:
            n = rng.randint(DEGREE_RANGE[0], DEGREE_RANGE[1] - 1)
            p = rng.randint(lo, hi)
            piece = filtered.rep_cycle(rng.randint(0, p - lo), p, n, field)
        extra = {m: piece.dim(m) for m in piece.degrees}
        if _fits(dims, extra):
            pieces.append(piece)
            for m, d in extra.items():
                dims[m] = dims.get(m, 0) + d
    E, _, _ = filtered.direct_sum(*pieces)
    twists = {}
    for n in E.degrees:
        ws = E.weights(n)
        twists[n] = _triangular(rng, field, sorted(range(len(ws)), key=lambda k: (ws[k], k)))
    diffs = {n: twists[n + 1] @ E.differential(n) @ inverse(twists[n])
             for n in E.degrees if n + 1 in twists}
    return filtered.checked(FilteredComplex(field, {n: E.weights(n) for n in E.degrees}, diffs))


def _inside(cells):
    lo, hi = DEGREE_RANGE
    return all(lo <= i <= hi and lo <= j <= hi for i, j in cells)


def random_bicomplex(rng, field, max_pieces=3):
    """A direct sum of cells, squares and short staircases in random bases."""
    lo, hi = DEGREE_RANGE
    pieces, dims = [], {}
    wanted = rng.randint(1, max_pieces)
    attempts = 0
    while len(pieces) < wanted and attempts < 20:
        attempts += 1
        p, q = rng.randint(lo, hi), rng.randint(lo, hi)
        roll = rng.random()
        if roll < 0.3:
            piece = bicomplex.unit_cell(p, q, field)
        elif roll < 0.6:
            piece = bicomplex.rep_witness_cycle(0, p, q, field)
        else:
            piece = bicomplex.rep_witness_cycle(rng.randint(1, 2), p, q, field)
        extra = {c: piece.dim(*c) for c in piece.cells}
        if _inside(piece.cells) and _fits(dims, extra):
            pieces.append(piece)
            for c, d in extra.items():
                dims[c] = dims.get(c, 0) + d
    if not pieces:
        return bicomplex.unit_cell(0, 0, field)
    E, _, _ = bicomplex.direct_sum(*pieces)
    twists = {c: _triangular(rng, field, list(range(E.dim(*c)))) for c in E.cells}
    d0 = {(i, j): twists[(i, j + 1)] @ E.vertical(i, j) @ inverse(twists[(i, j)])
          for i, j in E.cells if (i, j + 1) in twists}
    d1 = {(i, j): twists[(i - 1, j)] @ E.horizontal(i, j) @ inverse(twists[(i, j)])
          for i, j in E.cells if (i - 1, j) in twists}
    return bicomplex.checked(Bicomplex(field, {c: E.dim(*c) for c in E.cells}, d0, d1))


def random_chain_map(rng, source, target):
    """A random combination of a basis of Hom(source, target)."""
    _, homs = filtered.hom_space(source, target)
    field = source.field
    maps = {}
    for n in source.degrees:
        m = Matrix.zeros(field, target.dim(n), source.dim(n))
        for h in homs:
            m = m + h.map(n).scale(random_scalar(rng, field))
        maps[n] = m
    return filtered.checked_map(ChainMap(source, target, maps))


def random_bimap(rng, source, target):
    _, homs = bicomplex.hom_space(source, target)
    field = source.field
    maps = {}
    for c in source.cells:
        m = Matrix.zeros(field, target.dim(*c), source.dim(*c))
        for h in homs:
            m = m + h.component(*c).scale(random_scalar(rng, field))
        maps[c] = m
    return bicomplex.checked_map(BiMap(source, target, maps))


def random_s_set(rng, r, flavor):
    elements = {r} | set(s for s in range(r) if rng.random() < 0.5)
    if flavor == BICOMPLEX:
        elements.add(0)
    return SSet(elements, flavor)


def _twisted_chain_map(rng, f):
    """f∘σ for a random filtered isomorphism σ onto f.source."""
    E, field = f.source, f.field
    twists = {}
    for n in E.degrees:
        ws = E.weights(n)
        twists[n] = _triangular(rng, field, sorted(range(len(ws)), key=lambda k: (ws[k], k)))
    diffs = {n: inverse(twists[n + 1]) @ E.differential(n) @ twists[n]
             for n in E.degrees if n + 1 in twists}
    source = filtered.checked(FilteredComplex(field, {n: E.weights(n) for n in E.degrees}, diffs))
    return filtered.checked_map(ChainMap(source, f.target, {n: f.map(n) @ twists[n] for n in E.degrees}))


def _twisted_bimap(rng, f):
    E, field = f.source, f.field
    twists = {c: _triangular(rng, field, list(range(E.dim(*c)))) for c in E.cells}
    d0 = {(i, j): inverse(twists[(i, j + 1)]) @ E.vertical(i, j) @ twists[(i, j)]
          for i, j in E.cells if (i, j + 1) in twists}
    d1 = {(i, j): inverse(twists[(i - 1, j)]) @ E.horizontal(i, j) @ twists[(i, j)]
          for i, j in E.cells if (i - 1, j) in twists}
    source = bicomplex.checked(Bicomplex(field, {c: E.dim(*c) for c in E.cells}, d0, d1))
    return bicomplex.checked_map(BiMap(source, f.target, {c: f.component(*c) @ twists[c] for c in E.cells}))


def random_acyclic_fibration(rng, field, flavor, r):
    """A map that is an S-acyclic fibration for every S with max S = r.

    The split projection A ⊕ C → A off an r-acyclic C is sheared by a random
    map C → A and read in a random basis of its source, so its kernel is no
    coordinate summand.
    """
    if flavor == FILTERED:
        Y = random_filtered_complex(rng, field, max_pieces=1)
        C, _, _ = filtered.cone(filtered.identity_map(Y), r)
        if rng.random() < 0.25:
            return _twisted_chain_map(rng, filtered.omega_cone_fibration(C, r))
        A = random_filtered_complex(rng, field, max_pieces=2)
        E, _, projections = filtered.direct_sum(A, C)
        shear = filtered.compose(random_chain_map(rng, C, A), projections[1])
        pi = ChainMap(E, A, {n: projections[0].map(n) + shear.map(n) for n in E.degrees})
        return _twisted_chain_map(rng, filtered.checked_map(pi))
    if rng.random() < 0.25:
        return _twisted_bimap(rng, bicomplex.psi(bicomplex.cone(bicomplex.unit_cell(0, 0, field), r), r))
    Y = random_bicomplex(rng, field, max_pieces=1)
    A = random_bicomplex(rng, field, max_pieces=2)
    C = bicomplex.cone(Y, r)
    E, _, projections = bicomplex.direct_sum(A, C)
    shear = bicomplex.compose(random_bimap(rng, C, A), projections[1])
    pi = BiMap(E, A, {c: projections[0].component(*c) + shear.component(*c) for c in E.cells})
    return _twisted_bimap(rng, bicomplex.checked_map(pi))


# Checks shared by the suites

def _passed(report):
    return report["status"] == PASS, report


def _first_failure(rs, predicate):
    bad = [r for r in rs if not predicate(r)]
    return not bad, ({"r": bad[0]} if bad else None)


def unit_window(s, p):
    """Columns p-2s-3..p+2 with margin s+1: both s-page bidegrees clear of the cut."""
    return tot.Window(p - 2 * s - 3, p + 2, s + 1)


def adjunction_window(A, B):
    bounds = A.weight_range() or (0, 0)
    columns = B.column_range() or bounds
    return tot.Window(min(bounds[0], columns[0]) - 1, max(bounds[1] + 1, columns[1]), 1)


# Suite: pages

def pages_fixtures(config):
    field = config.field

    def shipped_cycle_page():
        A = codec.load(codec.fixture_path("z1_00"), field)
        return filtered.page(A, 2).is_zero()

    def empty_page():
        A = codec.load(codec.fixture_path("empty"), field)
        return filtered.page(A, 0).is_zero()

    return [("shipped_cycle_page", shipped_cycle_page), ("empty_page", empty_page)]


def pages_case(rng, config, index):
    field = config.field
    A = random_filtered_complex(rng, field)
    B = random_bicomplex(rng, field)
    rs = range(R_MAX + 1)

    def filtered_recursion():
        return _first_failure(rs, lambda r: filtered.page(A, r).homology_dims() == filtered.page(A, r + 1).dims())

    def bicomplex_recursion():
        return _first_failure(rs, lambda r: bicomplex.page(B, r).homology_dims() == bicomplex.page(B, r + 1).dims())

    def witness_tot_agreement():
        T = tot.tot_pi(B)
        return _first_failure(rs, lambda r: bicomplex.page(B, r).dims() == filtered.page(T, r).dims())

    def dec_shift_identity():
        return _first_failure(range(4), lambda r: filtered.decalage(filtered.shift(A, r), r) == A)

    def filtered_dims_via_hom():
        bad = []
        for r in range(3):
            E = filtered.page(A, r)
            for p, q in E.support():
                if filtered.page_dim_via_hom(A, r, p, q - p) != E.dim(p, q):
                    bad.append([r, p, q])
        return not bad, ({"failures": bad} if bad else None)

    def bicomplex_dims_via_hom():
        bad = []
        for r in range(3):
            E = bicomplex.page(B, r)
            for p, q in sorted(set(E.support()) | set(B.cells)):
                if bicomplex.page_dim_via_hom(B, r, p, q) != E.dim(p, q):
                    bad.append([r, p, q])
        return not bad, ({"failures": bad} if bad else None)

    checks = [run_check("filtered_recursion", filtered_recursion),
              run_check("bicomplex_recursion", bicomplex_recursion),
              run_check("witness_tot_agreement", witness_tot_agreement),
              run_check("dec_shift_identity", dec_shift_identity),
              run_check("filtered_dims_via_hom", filtered_dims_via_hom),
              run_check("bicomplex_dims_via_hom", bicomplex_dims_via_hom)]
    return checks, {"filtered": codec.encode(A), "bicomplex": codec.encode(B)}


# Suite: adjunction

def adjunction_fixtures(config):
    field = config.field
    fixtures = []
    for p, n in GRID:
        window = unit_window(3, p)
        fixtures.append(("decompose_s0_{}_{}".format(p, n),
                         lambda p=p, n=n, w=window: (True, {"summands": [
                             list(x) for x in tot.decompose_l_of_cycle(0, p, n, w, field)[1]]})))
        for s in (1, 2, 3):
            fixtures.append(("unit_on_cycle_s{}_{}_{}".format(s, p, n),
                             lambda s=s, p=p, n=n: _passed(
                                 tot.verify_unit_on_cycle(s, p, n, unit_window(s, p), field))))
    return fixtures


def adjunction_case(rng, config, index):
    field = config.field
    A = random_filtered_complex(rng, field, max_pieces=2)
    B = random_bicomplex(rng, field, max_pieces=2)
    window = adjunction_window(A, B)
    state = {}

    def build():
        state["L"] = tot.l_adjoint(A, window)
        state["R"] = tot.r_adjoint(A, window)
        return True

    def down_then_up():
        T = state["L"]
        g = random_chain_map(rng, A, tot.tot_pi(B))
        return tot.transpose_down(tot.transpose_up(g, T, B), T) == g

    def up_then_down():
        T = state["L"]
        f = random_bimap(rng, T.body, B)
        return tot.transpose_up(tot.transpose_down(f, T), T, B) == f

    def unit_transposes_identity():
        T = state["L"]
        eta = tot.unit(A, window)
        return tot.transpose_up(eta, T, T.body) == bicomplex.identity_bimap(T.body)

    def identities_preserved():
        identity = filtered.identity_map(A)
        return (tot.l_adjoint_map(identity, window) == bicomplex.identity_bimap(state["L"].body)
                and tot.r_adjoint_map(identity, window) == bicomplex.identity_bimap(state["R"].body))

    checks = [run_check("build_adjoints", build)]
    if "L" in state:
        checks.extend([run_check("down_then_up", down_then_up),
                       run_check("up_then_down", up_then_down),
                       run_check("unit_transposes_identity", unit_transposes_identity),
                       run_check("identities_preserved", identities_preserved)])
    return checks, {"filtered": codec.encode(A), "bicomplex": codec.encode(B), "window": window.to_dict()}


# Suite: stability (cones, loops and the stability pullbacks)

def stability_fixtures(config):
    field = config.field

    def zero_complex():
        return (_passed(model_check.stability_check_filtered(filtered.zero_complex(field), 1))[0]
                and _passed(model_check.stability_check_bicomplex(bicomplex.zero_bicomplex(field), 1))[0])

    def single_generator():
        return _passed(model_check.stability_check_filtered(filtered.pure(0, 0, field), 1))

    def single_cell():
        return _passed(model_check.stability_check_bicomplex(bicomplex.unit_cell(0, 0, field), 1))

    return [("stability_zero", zero_complex),
            ("stability_single_generator", single_generator),
            ("stability_single_cell", single_cell)]


def stability_case(rng, config, index):
    field = config.field
    A = random_filtered_complex(rng, field, max_pieces=2)
    B = random_filtered_complex(rng, field, max_pieces=2)
    r = rng.randint(0, 3)
    n, p = rng.randint(-2, 2), rng.randint(-2, 2)
    k = rng.randint(0, r)
    weq = filtered.direct_sum(A, filtered.rep_cycle(k, p, n, field))[1][0]
    non_weq = filtered.direct_sum(A, filtered.pure(p, n, field))[1][0]
    f = random_chain_map(rng, A, B)
    instances = {"source": codec.encode(A), "target": codec.encode(B), "r": r}

    def criterion(g):
        return filtered.is_r_weq(g, r) == filtered.is_r_acyclic(filtered.cone(g, r)[0], r)

    checks = [run_check("cone_criterion_random", lambda: criterion(f)),
              run_check("cone_criterion_weq", lambda: criterion(weq) and filtered.is_r_weq(weq, r)),
              run_check("cone_criterion_non_weq", lambda: criterion(non_weq) and not filtered.is_r_weq(non_weq, r))]

    if index < _half(config.cases):
        C = random_bicomplex(rng, field, max_pieces=2)
        s = rng.randint(0, 2)
        instances.update({"bicomplex": codec.encode(C), "s": s})

        def bicomplex_cone_acyclic():
            return bicomplex.is_r_acyclic(bicomplex.cone(C, s), s)

        def psi_witness_surjective():
            psi = bicomplex.psi(C, s)
            return _first_failure(range(s + 1), lambda k: bicomplex.is_witness_surjective(psi, k))

        checks.extend([run_check("bicomplex_cone_acyclic", bicomplex_cone_acyclic),
                       run_check("psi_witness_surjective", psi_witness_surjective),
                       run_check("stability_filtered", lambda: _passed(model_check.stability_check_filtered(A, s))),
                       run_check("stability_bicomplex", lambda: _passed(model_check.stability_check_bicomplex(C, s)))])
    return checks, instances


# Suite: properness (and the model structure fixtures)

def properness_fixtures(config):
    field = config.field
    fixtures = []
    for s in range(4):
        fixtures.append(("separation_s{}".format(s),
                         lambda s=s: _passed(model_check.separation_profile(s, points=[(0, 0), (1, -1)], field=field))))
    points = [(0, 0), (1, 0), (0, -1), (1, -1)]
    for flavor in (FILTERED, BICOMPLEX):
        S = SSet([0, 1], flavor)

        def generating_sets(S=S, flavor=flavor):
            module = filtered if flavor == FILTERED else bicomplex
            I, J = model_check.generating_sets(S, points, field)
            weq = all(module.is_r_weq(j.morphism, S.r) for j in J)
            counted = len(J) == len(S) * len(points)
            monos = flavor == BICOMPLEX or all(filtered.is_effective_mono(i.morphism) for i in I)
            return counted and weq and monos, {"I": len(I), "J": len(J)}

        def lifting(S=S, flavor=flavor):
            fibration = _fixture_fibration(flavor, S.r, field)
            _, J = model_check.generating_sets(S, points, field)
            failing = [r["generator"] for r in (model_check.check_lifting(j, fibration) for j in J)
                       if r["status"] != PASS]
            return not failing, ({"failing": failing} if failing else None)

        def identity_properness(S=S, flavor=flavor):
            if flavor == FILTERED:
                pi = filtered.identity_map(filtered.rep_cycle(1, 0, 0, field))
            else:
                pi = bicomplex.identity_bimap(bicomplex.rep_witness_cycle(1, 0, 0, field))
            return _passed(model_check.properness_harness(pi, S, (0, 0)))

        fixtures.extend([("generating_sets_{}".format(flavor), generating_sets),
                         ("lifting_{}".format(flavor), lifting),
                         ("properness_identity_{}".format(flavor), identity_properness)])
    return fixtures


def _fixture_fibration(flavor, r, field):
    if flavor == FILTERED:
        A, _, _ = filtered.direct_sum(filtered.rep_cycle(1, 0, 0, field), filtered.pure(1, 0, field))
        C, _, _ = filtered.cone(filtered.identity_map(filtered.rep_cycle(0, 1, -1, field)), r)
        return filtered.direct_sum(A, C)[2][0]
    A = bicomplex.direct_sum(bicomplex.rep_witness_cycle(1, 0, 0, field), bicomplex.unit_cell(1, 0, field))[0]
    C = bicomplex.cone(bicomplex.unit_cell(0, 0, field), r)
    return bicomplex.direct_sum(A, C)[2][0]


def properness_case(rng, config, index):
    field = config.field
    checks, instances = [], {}
    if index >= _half(config.cases):
        return checks, instances
    for flavor in (FILTERED, BICOMPLEX):
        r = rng.randint(0, 2)
        S = random_s_set(rng, r, flavor)
        pi = random_acyclic_fibration(rng, field, flavor, r)
        cof_index = (rng.randint(-2, 2), rng.randint(-2, 1))
        family = rng.choice([Generator.PHI, Generator.ZERO])
        s = rng.choice(S.to_list()) if family == Generator.ZERO else None
        instances[flavor] = {"map": codec.encode(pi), "S": S.to_list(), "cofibration": list(cof_index),
                             "family": family, "s": s}
        generated = run_check("generated_acyclic_fibration_{}".format(flavor),
                              lambda pi=pi, S=S: model_check.is_acyclic_fibration(pi, S))
        checks.append(generated)
        if generated["status"] != PASS:
            continue
        checks.append(run_check("properness_{}".format(flavor), lambda pi=pi, S=S, c=cof_index, fam=family, s=s:
                                _passed(model_check.properness_harness(pi, S, c, fam, s))))
    return checks, instances


# Suite: lattice

def lattice_fixtures(config):
    r = config.r if config.r_explicit else config.lattice_bound
    return [("lattice", lambda: _passed(lattice.verify_lattice(r, config.lattice_bound)))]


def no_cases(rng, config, index):
    return [], {}


def _half(cases):
    return (cases + 1) // 2


FIXTURES = {"pages": pages_fixtures, "adjunction": adjunction_fixtures, "stability": stability_fixtures,
            "properness": properness_fixtures, "lattice": lattice_fixtures}
CASES = {"pages": pages_case, "adjunction": adjunction_case, "stability": stability_case,
         "properness": properness_case, "lattice": no_cases}


# Running

def parallel_computation(function, suite, config):
    """function(suite, config, i) for every case index, in index order."""
    if config.jobs == 1 or config.cases < 2:
        return [function(suite, config, i) for i in range(config.cases)]
    n_jobs = min(cpu_count(), config.jobs)
    return Parallel(n_jobs=n_jobs)(delayed(function)(suite, config, i) for i in range(config.cases))


def run_case(suite, config, index):
    rng = instance_rng(config.seed, suite, index)
    try:
        checks, instances = CASES[suite](rng, config, index)
    except Exception as e:
        singer.log_warning("Case %s of %s could not be generated: %s", index, suite, e)
        return {"case": index, "status": FAIL, "checks": [],
                "error": "{}: {}".format(type(e).__name__, e)}
    if not checks:
        return None
    status = overall(checks)
    record = {"case": index, "status": status, "checks": checks}
    if status == FAIL:
        singer.log_warning("Finding in %s case %s (seed %s)", suite, index, config.seed)
        record["instances"] = instances
    return record


def run_suite(suite, config):
    if suite not in FIXTURES:
        raise ValueError("unknown suite {}".format(suite))
    started = pendulum.utcnow()
    singer.log_info("Starting suite %s with %s cases on %s jobs", suite, config.cases, config.jobs)
    with singer.metrics.job_timer(suite):
        fixtures = [run_check(name, fn) for name, fn in FIXTURES[suite](config)]
        results = [r for r in parallel_computation(run_case, suite, config) if r is not None]
    with singer.metrics.record_counter(suite) as counter:
        counter.increment(len(results))
    failed_cases = sum(1 for r in results if r["status"] == FAIL)
    failed_fixtures = sum(1 for f in fixtures if f["status"] == FAIL)
    status = FAIL if failed_cases or failed_fixtures else PASS
    singer.log_info("Finished suite %s: %s/%s cases and %s/%s fixtures failed in %ss", suite,
                    failed_cases, len(results), failed_fixtures, len(fixtures),
                    (pendulum.utcnow() - started).total_seconds())
    return {"suite": suite, "status": status,
            "summary": {"cases": len(results), "failed_cases": failed_cases,
                        "fixtures": len(fixtures), "failed_fixtures": failed_fixtures},
            "fixtures": fixtures, "cases": results}


def run(suite, config):
    """Run one suite or `all`; the report is deterministic for a given config."""
    names = SUITES if suite == "all" else (suite,)
    reports = [run_suite(name, config) for name in names]
    return {"seed": config.seed, "cases": config.cases, "field": config.field.name,
            "status": overall(reports), "suites": reports}
