"""Independent validation of double Hurwitz numbers by counting transitive
transposition factorizations in symmetric groups.

For mu with D = sum(mu), fix the permutation rho with consecutive cycles
(0..mu_1-1)(mu_1..mu_1+mu_2-1)...  For each cycle type lambda of degree D
with parts <= d_max and m = 2g - 2 + n + len(lambda), count tuples

    (tau_0, tau_1, ..., tau_m),  tau_0 of type lambda, tau_j transpositions,
    tau_0 tau_1 ... tau_m = rho,  <tau_0, ..., tau_m> transitive,

and assemble  sum_lambda q_lambda * N(lambda, mu, m) * s^m / (m! * prod mu_i).

The 1/prod(mu_i) factor converts fixed-rho tuple counts into automorphism-
weighted cover counts (orbit-stabilizer over the cycle-labelled centralizer
of rho); it is isolated in one function and the class refuses to report
comparison verdicts until it has been validated against golden table rows.

Two counters are provided: a depth-first enumerator with reachability
pruning (reference semantics, exponential), and an exact dynamic program
that merges tuple prefixes sharing (partial product, connectivity partition)
- it counts exactly the same tuples and is what production sweeps use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

from .cutjoin import DHTable, canonical_mu
from .weightpoly import WeightPolynomial

__all__ = ["FactorizationOracle", "OracleReport", "DegreeCapError",
           "dfs_count", "partitions_of"]


class DegreeCapError(RuntimeError):
    pass


def partitions_of(total: int, max_part: int | None = None):
    """Integer partitions of `total`, parts weakly decreasing."""
    max_part = total if max_part is None else min(max_part, total)

    def rec(remaining: int, cap: int, prefix: tuple[int, ...]):
        if remaining == 0:
            yield prefix
            return
        for part in range(min(cap, remaining), 0, -1):
            yield from rec(remaining - part, part, prefix + (part,))

    yield from rec(total, max_part, ())


def cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        x, count = start, 0
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            count += 1
        lengths.append(count)
    return tuple(sorted(lengths, reverse=True))


def cycle_count(perm: tuple[int, ...]) -> int:
    return len(cycle_type(perm))


def rho_from_mu(mu: tuple[int, ...]) -> tuple[int, ...]:
    """Consecutive-cycle permutation with the cycle lengths of mu."""
    images = list(range(sum(mu)))
    start = 0
    for part in mu:
        for k in range(part):
            images[start + k] = start + (k + 1) % part
        start += part
    return tuple(images)


def _canon_partition(labels) -> tuple[int, ...]:
    remap: dict[int, int] = {}
    out = []
    for l in labels:
        if l not in remap:
            remap[l] = len(remap)
        out.append(remap[l])
    return tuple(out)


def orbit_partition(perm: tuple[int, ...]) -> tuple[int, ...]:
    labels = [0] * len(perm)
    seen = [False] * len(perm)
    block = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        x = start
        while not seen[x]:
            seen[x] = True
            labels[x] = block
            x = perm[x]
        block += 1
    return _canon_partition(labels)


def _merge(partition: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    ca, cb = partition[a], partition[b]
    if ca == cb:
        return partition
    return _canon_partition(tuple(ca if c == cb else c for c in partition))


# ----------------------------------------------------------------------
# reference counter: depth-first enumeration with pruning


def dfs_count(d: int, lam: tuple[int, ...], rho: tuple[int, ...], m: int,
              require_transitive: bool = True) -> int:
    """Enumerate transposition tuples one by one (small degree only)."""
    transpositions = list(combinations(range(d), 2))
    target_cycles = cycle_count(rho)
    total = 0

    def extend(perm: tuple[int, ...], partition: tuple[int, ...], steps_left: int):
        nonlocal total
        cycles = cycle_count(perm)
        gap = abs(cycles - target_cycles)
        if gap > steps_left or (gap - steps_left) % 2:
            return
        if max(partition) + 1 - 1 > steps_left and require_transitive:
            return
        if steps_left == 0:
            if perm == rho and (not require_transitive or max(partition) == 0):
                total += 1
            return
        for a, b in transpositions:
            nxt = list(perm)
            nxt[a], nxt[b] = nxt[b], nxt[a]
            extend(tuple(nxt), _merge(partition, a, b), steps_left - 1)

    for tau0 in permutations(range(d)):
        if cycle_type(tau0) == lam:
            extend(tau0, orbit_partition(tau0), m)
    return total


# ----------------------------------------------------------------------
# production counter: prefix-merged dynamic program


class _GroupTables:
    """Per-degree lookup tables: permutation and set-partition indices with
    right-multiplication / merge transitions for every transposition."""

    _cache: dict[int, "_GroupTables"] = {}

    def __init__(self, d: int):
        self.d = d
        self.perms = list(permutations(range(d)))
        self.perm_index = {p: i for i, p in enumerate(self.perms)}
        self.partitions = self._all_partitions(d)
        self.part_index = {p: i for i, p in enumerate(self.partitions)}
        self.transpositions = list(combinations(range(d), 2))
        n_part = len(self.partitions)
        self.n_part = n_part
        # combined transition: state = perm_idx * n_part + part_idx
        self.transitions = []
        for a, b in self.transpositions:
            ptab = []
            for p in self.perms:
                q = list(p)
                q[a], q[b] = q[b], q[a]
                ptab.append(self.perm_index[tuple(q)])
            mtab = [self.part_index[_merge(code, a, b)] for code in self.partitions]
            self.transitions.append((ptab, mtab))
        self.full_partition = self.part_index[_canon_partition([0] * d)] if d else 0

    @staticmethod
    def _all_partitions(d: int) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = []

        def rec(prefix: list[int], mx: int):
            if len(prefix) == d:
                out.append(tuple(prefix))
                return
            for v in range(mx + 2):
                rec(prefix + [v], max(mx, v))

        rec([0], 0)
        return sorted(out)

    @classmethod
    def get(cls, d: int) -> "_GroupTables":
        if d not in cls._cache:
            cls._cache[d] = cls(d)
        return cls._cache[d]


def dp_count(d: int, lam: tuple[int, ...], rho: tuple[int, ...], m: int) -> int:
    """Exact count of transitive tuples, merging prefixes that share the
    same partial product and the same connectivity partition."""
    tables = _GroupTables.get(d)
    n_part = tables.n_part
    states: dict[int, int] = {}
    for i, p in enumerate(tables.perms):
        if cycle_type(p) == lam:
            key = i * n_part + tables.part_index[orbit_partition(p)]
            states[key] = states.get(key, 0) + 1
    for _ in range(m):
        new: dict[int, int] = {}
        for key, count in states.items():
            pi, mi = divmod(key, n_part)
            for ptab, mtab in tables.transitions:
                nk = ptab[pi] * n_part + mtab[mi]
                if nk in new:
                    new[nk] += count
                else:
                    new[nk] = count
        states = new
    target = tables.perm_index[rho] * n_part + tables.full_partition
    return states.get(target, 0)


# ----------------------------------------------------------------------
# assembly into weight polynomials


@dataclass
class OracleReport:
    g: int
    mu: tuple[int, ...]
    equal: bool
    counts: dict[tuple[tuple[int, ...], int], int]
    oracle_poly: WeightPolynomial
    recursion_poly: WeightPolynomial
    diffs: list = field(default_factory=list)


class FactorizationOracle:
    def __init__(self, d_max: int, degree_cap: int = 6):
        self.d_max = d_max
        self.degree_cap = degree_cap
        self._validated = False

    @staticmethod
    def tuple_weight(count: int, m: int, mu: tuple[int, ...]) -> Fraction:
        """Fixed-rho tuple count -> cover weight: the s^m/m! convention
        and the centralizer quotient 1/prod(mu_i).  Isolated here so the
        normalization can be audited and corrected in one place."""
        denom = factorial(m)
        for part in mu:
            denom *= part
        return Fraction(count, denom)

    def counts(self, g: int, mu) -> dict[tuple[tuple[int, ...], int], int]:
        mu = canonical_mu(mu)
        total = sum(mu)
        if total > self.degree_cap:
            raise DegreeCapError(
                f"degree {total} exceeds the oracle cap {self.degree_cap}"
            )
        rho = rho_from_mu(mu)
        n = len(mu)
        out: dict[tuple[tuple[int, ...], int], int] = {}
        for lam in partitions_of(total, self.d_max):
            m = 2 * g - 2 + n + len(lam)
            if m < 0:
                continue
            out[(lam, m)] = dp_count(total, lam, rho, m)
        return out

    def oracle_dh(self, g: int, mu) -> WeightPolynomial:
        mu = canonical_mu(mu)
        result = WeightPolynomial.zero(self.d_max)
        for (lam, m), count in self.counts(g, mu).items():
            if not count:
                continue
            weight = self.tuple_weight(count, m, mu)
            result = result + WeightPolynomial.q_partition(
                lam, self.d_max, coeff=weight, s_exponent=m
            )
        return result

    # ------------------------------------------------------------------

    def validate(self) -> bool:
        """Fail-closed check of the tuple-count normalization against
        golden table rows; must pass before comparisons are reported."""
        if self._validated:
            return True
        from .tables import load_golden

        wanted = {(0, (2,)), (0, (1, 1)), (0, (1, 1, 1)), (1, (2,))}
        rows = [row for row in load_golden("A") if (row.g, row.mu) in wanted]
        if len(rows) != len(wanted):
            raise RuntimeError("golden rows for oracle validation missing")
        for row in rows:
            got = self.oracle_dh(row.g, row.mu).at_s_one()
            want = {}
            for key, value in row.coeffs.items():
                if any(key[self.d_max:]):
                    continue  # weights beyond this oracle's d_max are cut
                padded = key[: self.d_max] + (0,) * (self.d_max - len(key))
                want[padded] = value
            if got != want:
                raise RuntimeError(
                    f"oracle normalization failed golden cross-check at "
                    f"g={row.g}, mu={row.mu}: got {got}, want {want}"
                )
        self._validated = True
        return True

    def compare(self, g: int, mu, table: DHTable | None = None) -> OracleReport:
        """Exact polynomial comparison against the cut-and-join engine."""
        self.validate()
        mu = canonical_mu(mu)
        table = table or DHTable(self.d_max)
        if table.d_max != self.d_max:
            raise ValueError("oracle and table d_max differ")
        counts = self.counts(g, mu)
        mine = self.oracle_dh(g, mu)
        theirs = table.dh(g, mu)
        diffs = []
        if mine != theirs:
            keys = set(mine.terms) | set(theirs.terms)
            for key in sorted(keys):
                a = mine.terms.get(key, Fraction(0))
                b = theirs.terms.get(key, Fraction(0))
                if a != b:
                    diffs.append((key, a, b))
        return OracleReport(
            g=g, mu=mu, equal=not diffs, counts=counts,
            oracle_poly=mine, recursion_poly=theirs, diffs=diffs,
        )
