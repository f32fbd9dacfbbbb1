"""Exact expectation, containment and failure-probability predictions.

Expected copy counts and first-order containment probabilities come from
the labeled-placement count C(n,t) * t! * 2^t / |aut H| (the 2^t sign
factor disappears for hypergraphs) times p^size.  The failure-probability
expansion in powers of 1/n enumerates configurations (isomorphism
classes of unions of distinct copies of the cataloged minimal
obstructions), attaches each configuration's inclusion-exclusion weight,
and expands the falling factorial (n)_t / n^t exactly.  All expansion
arithmetic is in rationals; floats appear only when a prediction is
evaluated at numeric (n, alpha).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .catalog import Catalog
from .isomorph import (
    automorphism_count,
    canonical_key,
    distinct_relabelings,
)
from .structures import (
    Clause,
    Formula,
    Hypergraph,
    excess_formula,
    excess_hypergraph,
    induced_formula,
    induced_hypergraph,
    is_full,
    is_k_dense,
)

EVENT_FLAGS = {
    "pl-fail": ("sat", "mff"),
    "unsat": ("sat", "muf"),
    "kcore": ("hypergraph", "minimal_k_dense"),
    "noncolorable": ("hypergraph", "min_non_k_colorable"),
}

_MAX_CONFIGURATIONS = 200_000
_MAX_COPIES_PER_CONFIGURATION = 24


class AlphaPoly:
    """A polynomial in the density parameter with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs: dict[int, Fraction] = {}
        if coeffs:
            for power, c in dict(coeffs).items():
                c = Fraction(c)
                if c:
                    self.coeffs[int(power)] = c

    @classmethod
    def term(cls, coefficient, power: int) -> "AlphaPoly":
        return cls({power: Fraction(coefficient)})

    def __add__(self, other: "AlphaPoly") -> "AlphaPoly":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, Fraction(0)) + c
        return AlphaPoly(out)

    def scaled(self, factor) -> "AlphaPoly":
        f = Fraction(factor)
        return AlphaPoly({p: c * f for p, c in self.coeffs.items()})

    def __call__(self, alpha):
        if isinstance(alpha, (int, Fraction)):
            return sum((c * Fraction(alpha) ** p for p, c in self.coeffs.items()),
                       Fraction(0))
        return float(sum(float(c) * float(alpha) ** p for p, c in self.coeffs.items()))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, AlphaPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for p in sorted(self.coeffs):
            c = self.coeffs[p]
            base = f"{c}" if p == 0 else (f"{c}*a" if p == 1 else f"{c}*a^{p}")
            parts.append(base)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return [[p, str(self.coeffs[p])] for p in sorted(self.coeffs)]


def _structure_facts(structure, k=None):
    if isinstance(structure, Formula):
        r = structure.width()
        if r is None:
            raise ValueError("empty structure has no clause width")
        return "sat", r, structure.order, structure.size, excess_formula(structure)
    if isinstance(structure, Hypergraph):
        r = structure.width()
        if r is None:
            raise ValueError("empty structure has no edge size")
        return "hypergraph", r, structure.order, structure.size, excess_hypergraph(structure, r)
    raise TypeError(f"unsupported structure {type(structure).__name__}")


def _sign_factor(kind: str, order: int) -> int:
    return 2 ** order if kind == "sat" else 1


def expected_copies_exact(structure, n: int, alpha) -> Fraction | float:
    """Exact expected number of copies in the random model at (n, alpha).

    (n)_t / n^t * 2^t/|aut| * alpha^size * n^(-excess) for formulas; the
    2^t factor drops for hypergraphs.  Exact (Fraction) when alpha is an
    int or Fraction.  Returns 0 when n < order.
    """
    kind, r, t, e, _ = _structure_facts(structure)
    if n < t:
        return Fraction(0) if isinstance(alpha, (int, Fraction)) else 0.0
    aut = automorphism_count(structure)
    falling = math.perm(n, t)
    coeff = Fraction(falling * _sign_factor(kind, t), aut)
    if isinstance(alpha, (int, Fraction)):
        return coeff * Fraction(alpha) ** e / Fraction(n) ** ((r - 1) * e)
    return float(coeff) * float(alpha) ** e / float(n) ** ((r - 1) * e)


@dataclass(frozen=True)
class FirstOrderTerm:
    """Leading containment term: coefficient * alpha^alpha_power * n^-exponent."""

    coefficient: Fraction
    alpha_power: int
    exponent: int

    def evaluate(self, n: int, alpha) -> Fraction | float:
        if isinstance(alpha, (int, Fraction)):
            return self.coefficient * Fraction(alpha) ** self.alpha_power / Fraction(n) ** self.exponent
        return float(self.coefficient) * float(alpha) ** self.alpha_power / float(n) ** self.exponent


def first_order_containment(structure, k: int | None = None) -> FirstOrderTerm:
    """Leading term of the containment probability for a minimal-core shape.

    The hypothesis requires a full formula or (given k) a k-dense
    hypergraph.  The constant is 2^order/|aut| for formulas (the 2^order
    is there because a placement chooses signs as well as variables) and
    1/|aut| for hypergraphs.
    """
    kind, r, t, e, excess = _structure_facts(structure)
    if kind == "sat":
        if not is_full(structure):
            raise ValueError("containment asymptotics require a full formula")
    else:
        if k is None:
            raise ValueError("hypergraph containment needs k")
        if not is_k_dense(structure, k):
            raise ValueError("containment asymptotics require a k-dense hypergraph")
    aut = automorphism_count(structure)
    return FirstOrderTerm(
        coefficient=Fraction(_sign_factor(kind, t), aut),
        alpha_power=e,
        exponent=excess,
    )


# ---------------------------------------------------------------------------
# conditional core-type distribution

@dataclass(frozen=True)
class CoreTypeDistribution:
    """Exact normalized weights over isomorphism classes at one excess level."""

    weights: tuple[tuple[bytes, Fraction], ...]

    def as_dict(self) -> dict[bytes, Fraction]:
        return dict(self.weights)


def core_type_distribution(entries, alpha) -> CoreTypeDistribution:
    """Weights alpha^size * 2^order / aut (formulas; drop 2^order for
    hypergraphs), normalized.  Entries must share one excess level."""
    entries = list(entries)
    if not entries:
        raise ValueError("need at least one catalog entry")
    if len({e.excess for e in entries}) != 1:
        raise ValueError("entries must all have the same excess")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    a = Fraction(alpha)  # exact also for floats, which are binary rationals
    raw = [
        (e.iso_key, a ** e.size * Fraction(_sign_factor(e.kind, e.order), e.aut_count))
        for e in entries
    ]
    total = sum(w for _, w in raw)
    return CoreTypeDistribution(tuple((key, w / total) for key, w in raw))


# ---------------------------------------------------------------------------
# the 1/n expansion of the failure probability

@dataclass(frozen=True)
class ExpansionPolynomial:
    """Coefficients of n^-s, s = 1..s_max, of a failure probability."""

    event: str
    s_max: int
    terms: dict[int, AlphaPoly]
    validity: str

    def evaluate(self, n: int, alpha) -> Fraction | float:
        exact = isinstance(alpha, (int, Fraction))
        total = Fraction(0) if exact else 0.0
        for s, poly in self.terms.items():
            val = poly(alpha)
            total += val / Fraction(n) ** s if exact else val / float(n) ** s
        return total

    def to_json_dict(self) -> dict:
        return {
            "format_version": 1,
            "event": self.event,
            "s_max": self.s_max,
            "terms": {str(s): poly.to_json() for s, poly in sorted(self.terms.items())},
            "validity": self.validity,
        }


def _falling_coeffs(t: int, d_max: int) -> list[Fraction]:
    """Coefficients of x^d, d <= d_max, in prod_{i=0}^{t-1} (1 - i*x)."""
    coeffs = [Fraction(1)] + [Fraction(0)] * d_max
    for i in range(t):
        for d in range(d_max, 0, -1):
            coeffs[d] -= i * coeffs[d - 1]
    return coeffs


def _configurations(bases: list, s_max: int, kind: str):
    """Isomorphism classes of unions of distinct base copies, excess <= s_max.

    Grown copy by copy: every union of m copies passes through unions of
    fewer copies of excess no larger, so breadth-first extension with a
    canonical-key seen-set is exhaustive.
    """
    excess_of = (lambda st: excess_formula(st)) if kind == "sat" else (
        lambda st: excess_hypergraph(st, st.width()))
    images = [distinct_relabelings(b) for b in bases]
    seen: dict[bytes, object] = {}
    queue: list = []
    for b in bases:
        key = canonical_key(b)
        if key not in seen:
            seen[key] = b
            queue.append(b)
    while queue:
        w = queue.pop()
        if excess_of(w) >= s_max:
            continue
        t_w = w.order
        if kind == "sat":
            w_items = set(w.clauses)
        else:
            w_items = set(w.edges)
        for base, imgs in zip(bases, images):
            t_h = base.order
            for overlap in range(min(t_w, t_h) + 1):
                fresh = tuple(range(t_w + 1, t_w + (t_h - overlap) + 1))
                for shared in itertools.combinations(range(1, t_w + 1), overlap):
                    ground = tuple(sorted(shared)) + fresh
                    for img in imgs:
                        if kind == "sat":
                            placed = {
                                Clause(tuple((1 if l > 0 else -1) * ground[abs(l) - 1]
                                             for l in cl.literals))
                                for cl in img.clauses
                            }
                            new_items = w_items | placed
                            if len(new_items) == len(w_items):
                                continue
                            candidate = Formula(t_w + len(fresh), new_items)
                        else:
                            placed = {
                                tuple(sorted(ground[v - 1] for v in e)) for e in img.edges
                            }
                            new_items = w_items | placed
                            if len(new_items) == len(w_items):
                                continue
                            candidate = Hypergraph(t_w + len(fresh), new_items)
                        if excess_of(candidate) > s_max:
                            continue
                        key = canonical_key(candidate)
                        if key in seen:
                            continue
                        if len(seen) > _MAX_CONFIGURATIONS:
                            raise RuntimeError("configuration enumeration exploded")
                        seen[key] = candidate
                        queue.append(candidate)
    return list(seen.values())


def _copies_inside(w, bases, kind: str):
    """All substructures of w isomorphic to some base, as (vars, items) pairs."""
    out = []
    if kind == "sat":
        items = w.sorted_clauses()
    else:
        items = w.sorted_edges()
    for base in bases:
        target = canonical_key(base)
        e_b, t_b = base.size, base.order
        for subset in itertools.combinations(items, e_b):
            if kind == "sat":
                used = frozenset(v for cl in subset for v in cl.variables)
            else:
                used = frozenset(v for e in subset for v in e)
            if len(used) != t_b:
                continue
            dense, _ = (induced_formula(subset) if kind == "sat"
                        else induced_hypergraph(subset))
            if canonical_key(dense) == target:
                out.append((used, frozenset(subset)))
    return out


def _cover_weight(w, bases, kind: str) -> int:
    """Signed number of ways the copies inside w cover w exactly:
    sum over covering subsets S of (-1)^(|S|+1)."""
    copies = _copies_inside(w, bases, kind)
    if len(copies) > _MAX_COPIES_PER_CONFIGURATION:
        raise RuntimeError(f"{len(copies)} copies in one configuration; refusing")
    all_vars = frozenset(range(1, w.order + 1))
    all_items = frozenset(w.clauses if kind == "sat" else w.edges)
    total = 0
    for m in range(1, len(copies) + 1):
        for subset in itertools.combinations(copies, m):
            vars_union = frozenset().union(*(s[0] for s in subset))
            items_union = frozenset().union(*(s[1] for s in subset))
            if vars_union == all_vars and items_union == all_items:
                total += 1 if m % 2 else -1
    return total


def failure_expansion(catalog: Catalog, event: str, s_max: int) -> ExpansionPolynomial:
    """Exact polynomials p_s with failure probability sum_s p_s(alpha) n^-s + O(n^-s_max-1).

    Requires a catalog certified complete through excess s_max for the
    event's obstruction class; refuses otherwise rather than emitting
    uncertifiable coefficients.
    """
    if event not in EVENT_FLAGS:
        raise ValueError(f"unknown event {event!r}; one of {sorted(EVENT_FLAGS)}")
    kind, flag = EVENT_FLAGS[event]
    if catalog.kind != kind:
        raise ValueError(f"event {event!r} needs a {kind!r} catalog")
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    if not catalog.complete or catalog.max_excess < s_max:
        raise ValueError(
            f"catalog certifies excess <= {catalog.max_excess if catalog.complete else 'nothing'}"
            f"; cannot expand to order n^-{s_max}"
        )
    bases = [e.structure for e in catalog.with_flag(flag) if e.excess <= s_max]
    terms: dict[int, AlphaPoly] = {s: AlphaPoly() for s in range(1, s_max + 1)}
    for w in _configurations(bases, s_max, kind):
        if kind == "sat":
            ex_w = excess_formula(w)
        else:
            ex_w = excess_hypergraph(w, w.width())
        sigma = _cover_weight(w, bases, kind)
        if sigma == 0:
            continue
        aut = automorphism_count(w)
        base_coeff = Fraction(sigma * _sign_factor(kind, w.order), aut)
        falling = _falling_coeffs(w.order, s_max - ex_w)
        for s in range(ex_w, s_max + 1):
            contribution = AlphaPoly.term(base_coeff * falling[s - ex_w], w.size)
            terms[s] = terms[s] + contribution
    validity = (
        f"complete catalog through excess {catalog.max_excess} "
        f"(order cap {catalog.order_cap}, size cap {catalog.size_cap})"
    )
    return ExpansionPolynomial(event=event, s_max=s_max, terms=terms, validity=validity)


# ---------------------------------------------------------------------------
# explicit tail bounds for medium-size structures

def tail_bound(r: int, alpha: float, n: int, t: int) -> float:
    """Upper bound ((4^((r-1)/r) e a^(2/r)) (t/n)^(1-2/r))^t on the probability
    of a full subformula with exactly t variables; valid for
    1 <= t <= n / (2 a^(1/(r-1)))."""
    if r < 3:
        raise ValueError("needs r >= 3")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 1 <= t <= n / (2 * alpha ** (1.0 / (r - 1))):
        raise ValueError(f"t={t} outside the valid range [1, n/(2 a^(1/(r-1)))]")
    base = (4.0 ** ((r - 1) / r)) * math.e * alpha ** (2.0 / r) * (t / n) ** (1.0 - 2.0 / r)
    return base ** t


def tail_bound_hypergraph(r: int, k: int, alpha: float, n: int, t: int) -> float:
    """Upper bound ((e a^(k/r)) (t/n)^(k-1-1/r))^t on the probability of a
    k-dense subhypergraph with exactly t vertices; valid for
    1 <= t <= n / a^(1/(r-1))."""
    if r < 2 or k < 2 or r + k <= 4:
        raise ValueError("needs r, k >= 2 and r + k > 4")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 1 <= t <= n / alpha ** (1.0 / (r - 1)):
        raise ValueError(f"t={t} outside the valid range [1, n/a^(1/(r-1))]")
    base = math.e * alpha ** (k / r) * (t / n) ** (k - 1 - 1.0 / r)
    return base ** t
