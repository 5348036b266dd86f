"""Golden reference tables and their regeneration.

The package ships two tables of expected values at s = 1: table A holds
double Hurwitz polynomials, table B their pruned counterparts.  Both are
regenerated from scratch by the engines and diffed monomial by monomial;
the factorization oracle independently cross-checks a subset of table A,
which guards the stored data against transcription slips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .cutjoin import DHTable
from .weightpoly import WeightPolynomial, format_rational, parse_rational

__all__ = ["GoldenRow", "TableDiff", "load_golden", "regenerate", "diff_table",
           "GOLDEN_D_MAX", "render_rows_text", "render_rows_json", "render_rows_csv"]

GOLDEN_D_MAX = 5

_FILES = {"A": "golden_dh.json", "B": "golden_ph.json"}


@dataclass(frozen=True)
class GoldenRow:
    g: int
    mu: tuple[int, ...]
    coeffs: dict[tuple[int, ...], Fraction]  # q exponent vector -> value at s=1


@dataclass
class TableDiff:
    table: str
    mismatches: list = field(default_factory=list)
    row_count: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _parts_to_exponents(parts: list[int], d_max: int) -> tuple[int, ...]:
    exps = [0] * d_max
    for p in parts:
        exps[p - 1] += 1
    return tuple(exps)


def load_golden(table: str) -> list[GoldenRow]:
    if table not in _FILES:
        raise ValueError("table must be 'A' or 'B'")
    payload = resources.files("dhtr").joinpath("data", _FILES[table]).read_text()
    rows = []
    for entry in json.loads(payload):
        coeffs = {
            _parts_to_exponents(term["parts"], GOLDEN_D_MAX): parse_rational(term["coeff"])
            for term in entry["poly"]
        }
        rows.append(GoldenRow(entry["g"], tuple(entry["mu"]), coeffs))
    return rows


def regenerate(table: str, dh_table: DHTable | None = None):
    """Recompute every golden row with the engines; yields
    (row, computed WeightPolynomial)."""
    rows = load_golden(table)
    dh_table = dh_table or DHTable(GOLDEN_D_MAX)
    if table == "A":
        for row in rows:
            yield row, dh_table.dh(row.g, row.mu)
    else:
        from .pruning import PruningTransform

        transform = PruningTransform(dh_table)
        for row in rows:
            yield row, transform.ph(row.g, row.mu)


def diff_table(table: str, dh_table: DHTable | None = None) -> TableDiff:
    diff = TableDiff(table=table)
    for row, computed in regenerate(table, dh_table):
        diff.row_count += 1
        got = computed.at_s_one()
        if got != row.coeffs:
            diff.mismatches.append((row.g, row.mu, row.coeffs, got))
    return diff


# ----------------------------------------------------------------------
# rendering


def _mu_label(mu: tuple[int, ...]) -> str:
    if all(p <= 9 for p in mu):
        return "(" + "".join(str(p) for p in mu) + ")"
    return "(" + ",".join(str(p) for p in mu) + ")"


def render_polynomial_s1(poly: WeightPolynomial) -> str:
    """Value at s = 1 with monomials in degree-lexicographic partition
    order, matching the golden table layout."""
    collapsed = poly.at_s_one()
    items = []
    for qexps, coeff in collapsed.items():
        parts = WeightPolynomial._partition_of(qexps)
        items.append((parts, qexps, coeff))
    items.sort(key=lambda it: (-sum(it[0]), tuple(-p for p in it[0])))
    pieces = []
    for _, qexps, coeff in items:
        factors = []
        if coeff != 1 or not any(qexps):
            factors.append(format_rational(coeff))
        for i in range(len(qexps) - 1, -1, -1):
            if qexps[i] == 1:
                factors.append(f"q{i + 1}")
            elif qexps[i] > 1:
                factors.append(f"q{i + 1}^{qexps[i]}")
        pieces.append(" ".join(factors))
    return " + ".join(pieces) if pieces else "0"


def render_rows_text(rows) -> str:
    lines = []
    for g, mu, poly in rows:
        lines.append(f"{g} {_mu_label(mu)} {render_polynomial_s1(poly)}")
    return "\n".join(lines)


def render_rows_json(rows) -> str:
    payload = [
        {"g": g, "mu": list(mu), "poly": poly.to_json()}
        for g, mu, poly in rows
    ]
    return json.dumps(payload, indent=1)


def render_rows_csv(rows) -> str:
    lines = ["g,mu,poly"]
    for g, mu, poly in rows:
        mu_str = " ".join(str(p) for p in mu)
        lines.append(f'{g},{mu_str},"{render_polynomial_s1(poly)}"')
    return "\n".join(lines)
