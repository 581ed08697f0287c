"""The lattice of indexing sets S of the S-model structures.

An element is a finite nonempty set of naturals. The order is generated by
T ≤ S when T ⊂ S with max T = max S, and T ≤ T + 1. The join-irreducibles
are {n} and {0, n} for n ≥ 1; an element is represented by the lower set of
join-irreducibles below it.
"""
from collections import deque
from itertools import combinations, product

import singer

from spectral_models.report import overall, run_check


class EmptyMeet(Exception):
    """The meet formula produced the empty set."""


class MalformedLowerSet(Exception):
    """A family of join-irreducibles is not a lower set."""


def element(values):
    s = frozenset(int(v) for v in values)
    if not s:
        raise ValueError("lattice elements are nonempty")
    if min(s) < 0:
        raise ValueError("lattice elements are sets of naturals, got {}".format(sorted(s)))
    return s


def _shift(s, k):
    return frozenset(x + k for x in s)


def join(S, T):
    """(S + m - max S) ∪ (T + m - max T) with m = max(S ∪ T)."""
    S, T = element(S), element(T)
    m = max(S | T)
    return _shift(S, m - max(S)) | _shift(T, m - max(T))


def meet(S, T):
    """(S - m + max T) ∩ (T - m + max S) with m = max(S ∪ T)."""
    S, T = element(S), element(T)
    m = max(S | T)
    result = _shift(S, max(T) - m) & _shift(T, max(S) - m)
    if not result:
        raise EmptyMeet("meet of {} and {} is empty".format(sorted(S), sorted(T)))
    return result


def alpha(S):
    """The lower set {{1}, ..., {s}} ∪ {{0, s - t} : t ∈ S, t < s}, s = max S."""
    S = element(S)
    s = max(S)
    lower = set(frozenset([n]) for n in range(1, s + 1))
    lower.update(frozenset([0, s - t]) for t in S if t < s)
    return frozenset(lower)


def _check_join_irreducible(x):
    if len(x) == 1 and min(x) >= 1:
        return
    if len(x) == 2 and min(x) == 0:
        return
    raise MalformedLowerSet("{} is not of the form {{n}} or {{0, n}} with n >= 1".format(sorted(x)))


def beta(L):
    """The inverse of alpha: {s - u : {0, u} ∈ L} ∪ {s}, s the largest singleton in L."""
    L = frozenset(frozenset(x) for x in L)
    for x in L:
        _check_join_irreducible(x)
    singletons = [min(x) for x in L if len(x) == 1]
    s = max(singletons) if singletons else 0
    missing = [n for n in range(1, s + 1) if frozenset([n]) not in L]
    if missing:
        raise MalformedLowerSet("lower set with {{{}}} lacks {{{}}}".format(s, missing[0]))
    pairs = [max(x) for x in L if len(x) == 2]
    too_big = [u for u in pairs if u > s]
    if too_big:
        raise MalformedLowerSet("{{0, {}}} lies above every singleton of the set".format(too_big[0]))
    return frozenset([s - u for u in pairs] + [s])


def leq(T, S):
    return alpha(T) <= alpha(S)


def elements(r):
    """Every nonempty subset of {0, ..., r}, in a fixed order."""
    universe = range(r + 1)
    return [frozenset(c) for k in range(1, r + 2) for c in combinations(universe, k)]


def generator_edges(r):
    """The generating relations T → S inside the elements with max ≤ r."""
    edges = []
    for T in elements(r):
        for S in elements(r):
            if T == S:
                continue
            if T < S and max(T) == max(S):
                edges.append((T, S))
            elif S == _shift(T, 1):
                edges.append((T, S))
    return edges


def reachable(T, S):
    """Whether S is reachable from T along generating relations."""
    T, S = element(T), element(S)
    if T == S:
        return True
    r = max(max(T), max(S))
    following = {}
    for a, b in generator_edges(r):
        following.setdefault(a, []).append(b)
    seen = {T}
    queue = deque([T])
    while queue:
        x = queue.popleft()
        for y in following.get(x, ()):
            if y == S:
                return True
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return False


def join_irreducibles(r):
    if r < 1:
        raise ValueError("join-irreducibles need r >= 1, got {}".format(r))
    out = []
    for n in range(1, r + 1):
        out.append(frozenset([n]))
        out.append(frozenset([0, n]))
    return out


def ji_leq(a, b):
    """{m} ≤ {n} and {m} ≤ {0, n} for m ≤ n; {0, m} lies only below itself."""
    _check_join_irreducible(a)
    _check_join_irreducible(b)
    if len(a) == 1:
        return min(a) <= max(b)
    return a == b


def is_join_irreducible(S, r=None):
    """Neither the bottom {0} nor a join of two strictly smaller elements."""
    S = element(S)
    if S == frozenset([0]):
        return False
    r = max(S) if r is None else r
    below = [T for T in elements(r) if T != S and leq(T, S)]
    return not any(join(a, b) == S for a in below for b in below)


def enumerate_lower_sets(r):
    """Every lower set of the join-irreducibles with n ≤ r, ∅ first."""
    irreducibles = join_irreducibles(r) if r >= 1 else []
    found = []
    for k in range(len(irreducibles) + 1):
        for chosen in combinations(irreducibles, k):
            chosen = frozenset(chosen)
            if all(a in chosen for b in chosen for a in irreducibles if ji_leq(a, b)):
                found.append(chosen)
    return found


def to_list(S):
    return sorted(S)


def lower_set_to_list(L):
    return sorted(sorted(x) for x in L)


# Exhaustive verification

def _triples(r):
    xs = elements(r)
    return product(xs, xs, xs)


def check_distributive(r, bound=4):
    """Both distributive laws and a ≤ a∨b, a∧b ≤ a over every triple with max ≤ r."""
    if r > bound:
        raise ValueError("exhaustive check limited to r <= {}, got {}".format(bound, r))
    findings = []
    count = 0
    for a, b, c in _triples(r):
        count += 1
        try:
            if join(a, meet(b, c)) != meet(join(a, b), join(a, c)):
                findings.append({"law": "join over meet", "triple": [to_list(a), to_list(b), to_list(c)]})
            if meet(a, join(b, c)) != join(meet(a, b), meet(a, c)):
                findings.append({"law": "meet over join", "triple": [to_list(a), to_list(b), to_list(c)]})
            if not leq(a, join(a, b)) or not leq(meet(a, b), a):
                findings.append({"law": "bounds", "pair": [to_list(a), to_list(b)]})
        except EmptyMeet as e:
            findings.append({"law": "nonempty meet", "error": str(e)})
    singer.log_info("Distributivity over N_%s: %s triples, %s findings", r, count, len(findings))
    return {"check": "distributive", "r": r, "elements": len(elements(r)), "triples": count,
            "status": "pass" if not findings else "fail", "findings": findings[:10]}


def verify_lattice(r, bound=4):
    """Every exhaustive property of the lattice with max ≤ r."""
    xs = elements(r)

    def birkhoff_inverse():
        bad = [to_list(S) for S in xs if beta(alpha(S)) != S]
        lowers = enumerate_lower_sets(r)
        images = set(beta(L) for L in lowers)
        ok = not bad and len(lowers) == len(xs) and images == set(xs)
        return ok, {"lower_sets": len(lowers), "elements": len(xs), "not_inverse": bad[:10]}

    def preserves_operations():
        bad = []
        for a, b in product(xs, xs):
            if alpha(join(a, b)) != alpha(a) | alpha(b) or alpha(meet(a, b)) != alpha(a) & alpha(b):
                bad.append([to_list(a), to_list(b)])
        return not bad, {"failures": bad[:10]}

    def order_matches_generators():
        bad = [[to_list(a), to_list(b)] for a, b in product(xs, xs) if leq(a, b) != reachable(a, b)]
        return not bad, {"failures": bad[:10]}

    def meets_nonempty():
        bad = []
        for a, b in product(xs, xs):
            try:
                meet(a, b)
            except EmptyMeet:
                bad.append([to_list(a), to_list(b)])
        return not bad, {"failures": bad[:10]}

    def irreducibles():
        if r < 1:
            return True
        expected = set(join_irreducibles(r))
        found = set(S for S in xs if is_join_irreducible(S, r))
        return found == expected, {"found": sorted(to_list(S) for S in found)}

    checks = [check_distributive(r, bound),
              run_check("birkhoff_inverse", birkhoff_inverse),
              run_check("preserves_operations", preserves_operations),
              run_check("order_matches_generators", order_matches_generators),
              run_check("meets_nonempty", meets_nonempty),
              run_check("join_irreducibles", irreducibles)]
    return {"check": "lattice", "r": r, "status": overall(checks), "checks": checks}
