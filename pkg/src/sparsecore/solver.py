"""Decision procedures: reduce to the core, then exhaust the core.

Satisfiability (with an exact MaxSAT count), minimal unsatisfiable
subformula extraction by deletion, and the k-colorability analogue with
minimal obstruction extraction.  Cores below the pure-literal / k-core
thresholds are almost always tiny, so exhausting 2^t assignments or k^t
colorings is cheap on typical inputs; a budget guards the exceptional
case and exceeding it raises rather than guessing.

Witnesses are deterministic: the lexicographically least satisfying
assignment / proper coloring of the core (variable 1 most significant,
False < True, colors 1..k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .structures import (
    BudgetExceededError,
    Clause,
    Formula,
    Hypergraph,
    induced_formula,
    induced_hypergraph,
)
from .reduction import _k_core_raw, _pure_literal_raw, k_core, pure_literal_core

_CHUNK = 1 << 16


# ---------------------------------------------------------------------------
# checking helpers

def satisfies(formula: Formula, assignment: tuple[bool, ...]) -> bool:
    return count_satisfied(formula, assignment) == formula.size


def count_satisfied(formula: Formula, assignment: tuple[bool, ...]) -> int:
    if len(assignment) != formula.order:
        raise ValueError("assignment length mismatch")
    n = 0
    for cl in formula.clauses:
        if any((l > 0) == assignment[abs(l) - 1] for l in cl.literals):
            n += 1
    return n


def proper_coloring(graph: Hypergraph, coloring: tuple[int, ...]) -> bool:
    """No edge monochromatic (weak hypergraph coloring)."""
    if len(coloring) != graph.order:
        raise ValueError("coloring length mismatch")
    for e in graph.edges:
        colors = {coloring[v - 1] for v in e}
        if len(colors) == 1:
            return False
    return True


# ---------------------------------------------------------------------------
# exhaustive scans (assignment bit i encodes variable t-i: ascending ints
# are lexicographically ascending assignment tuples)

def _clause_masks(clauses, t: int):
    pos = np.zeros(len(clauses), dtype=np.uint64)
    neg = np.zeros(len(clauses), dtype=np.uint64)
    for i, lits in enumerate(clauses):
        p = m = 0
        for l in lits:
            bit = 1 << (t - abs(l))
            if l > 0:
                p |= bit
            else:
                m |= bit
        pos[i] = p
        neg[i] = m
    return pos, neg


def _assignment_tuple(a: int, t: int) -> tuple[bool, ...]:
    return tuple(bool((a >> (t - i)) & 1) for i in range(1, t + 1))


def least_satisfying(clauses, t: int) -> int | None:
    """Least satisfying assignment of width-t clauses, or None."""
    if not clauses:
        return 0
    pos, neg = _clause_masks(clauses, t)
    full = np.uint64(2 ** t - 1)
    for start in range(0, 2 ** t, _CHUNK):
        arr = np.arange(start, min(start + _CHUNK, 2 ** t), dtype=np.uint64)
        ok = np.ones(len(arr), dtype=bool)
        for p, m in zip(pos, neg):
            ok &= ((arr & p) != 0) | ((~arr & full) & m != 0)
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if len(hits):
            return start + int(hits[0])
    return None


def max_satisfied_assignment(clauses, t: int) -> tuple[int, int]:
    """(maximum satisfiable count, least assignment attaining it)."""
    if not clauses:
        return 0, 0
    pos, neg = _clause_masks(clauses, t)
    full = np.uint64(2 ** t - 1)
    best_count, best_a = -1, 0
    for start in range(0, 2 ** t, _CHUNK):
        arr = np.arange(start, min(start + _CHUNK, 2 ** t), dtype=np.uint64)
        counts = np.zeros(len(arr), dtype=np.int32)
        for p, m in zip(pos, neg):
            counts += (((arr & p) != 0) | ((~arr & full) & m != 0))
        i = int(np.argmax(counts))
        if int(counts[i]) > best_count:
            best_count, best_a = int(counts[i]), start + i
    return best_count, best_a


def least_coloring(edges, t: int, k: int) -> tuple[int, ...] | None:
    """Least proper k-coloring (vertex 1 most significant digit), or None."""
    if t == 0:
        return ()
    total = k ** t
    place = [k ** (t - v) for v in range(1, t + 1)]  # digit weight of vertex v
    for start in range(0, total, _CHUNK):
        arr = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = [(arr // place[v - 1]) % k for v in range(1, t + 1)]
        ok = np.ones(len(arr), dtype=bool)
        for e in edges:
            mono = np.ones(len(arr), dtype=bool)
            first = digits[e[0] - 1]
            for v in e[1:]:
                mono &= digits[v - 1] == first
            ok &= ~mono
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if len(hits):
            a = start + int(hits[0])
            return tuple((a // place[v - 1]) % k + 1 for v in range(1, t + 1))
    return None


# ---------------------------------------------------------------------------
# satisfiability

@dataclass(frozen=True)
class SatVerdict:
    status: str  # "SAT" | "UNSAT"
    assignment: tuple[bool, ...]  # satisfying on SAT, a MaxSAT optimum on UNSAT
    max_satisfied: int
    muf: Formula | None
    muf_variables: tuple[int, ...] | None  # original labels of muf variables
    core_order: int
    core_size: int


def decide_sat(formula: Formula, core_budget: int = 28) -> SatVerdict:
    """Pure-literal reduction, then exhaustion of the core.

    MaxSAT decomposes: clauses removed by the trace are all satisfied once
    their pure literals are set True, so the optimum is (removed clauses)
    + MaxSAT(core).  A core larger than ``core_budget`` raises
    BudgetExceededError; the answer is never guessed.
    """
    core, trace = pure_literal_core(formula)
    removed = formula.size - core.size
    if core.order > core_budget:
        raise BudgetExceededError(
            f"core order {core.order} exceeds budget {core_budget}"
        )
    clauses = [cl.literals for cl in core.sorted_clauses()]
    a = least_satisfying(clauses, core.order) if core.size else 0
    if a is not None:
        assignment = trace.extend_assignment(_assignment_tuple(a, core.order))
        if not satisfies(formula, assignment):
            raise RuntimeError("lifted assignment fails verification")
        return SatVerdict("SAT", assignment, formula.size, None, None,
                          core.order, core.size)
    best_count, best_a = max_satisfied_assignment(clauses, core.order)
    assignment = trace.extend_assignment(_assignment_tuple(best_a, core.order))
    max_sat = removed + best_count
    if count_satisfied(formula, assignment) != max_sat:
        raise RuntimeError("MaxSAT lift fails verification")
    muf_dense, muf_core_vars = _extract_muf_impl(core, core_budget)
    muf_vars = tuple(trace.core_variables[v - 1] for v in muf_core_vars)
    return SatVerdict("UNSAT", assignment, max_sat, muf_dense, muf_vars,
                      core.order, core.size)


def _is_unsat(clause_literals, core_budget: int) -> bool:
    core_idx, core_vars, _ = _pure_literal_raw(list(clause_literals))
    if not core_idx:
        return False
    dense, _ = induced_formula(Clause(clause_literals[i]) for i in core_idx)
    if dense.order > core_budget:
        raise BudgetExceededError(
            f"core order {dense.order} exceeds budget {core_budget}"
        )
    lits = [cl.literals for cl in dense.sorted_clauses()]
    return least_satisfying(lits, dense.order) is None


def _extract_muf_impl(formula: Formula, core_budget: int):
    kept = [cl.literals for cl in formula.sorted_clauses()]
    if not _is_unsat(kept, core_budget):
        raise ValueError("input formula is satisfiable; no MUF exists")
    i = 0
    while i < len(kept):
        trial = kept[:i] + kept[i + 1:]
        if _is_unsat(trial, core_budget):
            kept = trial
        else:
            i += 1
    dense, support = induced_formula(Clause(lits) for lits in kept)
    return dense, support


def extract_muf(formula: Formula, core_budget: int = 28) -> Formula:
    """Deletion-minimal unsatisfiable subformula, unused variables dropped.

    The result is unsatisfiable and every single-clause deletion of it is
    satisfiable.  Deletion candidates are re-checked through reduction
    plus exhaustion, so each of the O(size) checks touches only a core.
    """
    dense, _ = _extract_muf_impl(formula, core_budget)
    return dense


# ---------------------------------------------------------------------------
# k-colorability

@dataclass(frozen=True)
class ColorVerdict:
    colorable: bool
    coloring: tuple[int, ...] | None  # colors 1..k per vertex, when colorable
    obstruction: Hypergraph | None
    obstruction_vertices: tuple[int, ...] | None
    core_order: int
    core_size: int


def decide_colorable(graph: Hypergraph, k: int,
                     coloring_budget: int = 300_000_000) -> ColorVerdict:
    """k-core reduction, then exhaustion of the core's k^t colorings.

    A graph is k-colorable iff its k-core is, and a coloring of the core
    extends greedily through the peel trace.  A non-colorable core is
    minimized edge-by-edge into a minimal non-k-colorable obstruction.
    """
    core, trace = k_core(graph, k)
    if k ** core.order > coloring_budget:
        raise BudgetExceededError(
            f"{k}^{core.order} colorings exceed budget {coloring_budget}"
        )
    edges = list(core.sorted_edges())
    col = least_coloring(edges, core.order, k)
    if col is not None:
        full = trace.extend_coloring(col)
        if not proper_coloring(graph, full):
            raise RuntimeError("lifted coloring fails verification")
        return ColorVerdict(True, full, None, None, core.order, core.size)
    kept = edges
    i = 0
    while i < len(kept):
        trial = kept[:i] + kept[i + 1:]
        if _is_noncolorable(core.order, trial, k, coloring_budget):
            kept = trial
        else:
            i += 1
    dense, support = induced_hypergraph(kept)
    original = tuple(trace.core_vertices[v - 1] for v in support)
    return ColorVerdict(False, None, dense, original, core.order, core.size)


def _is_noncolorable(n: int, edges, k: int, coloring_budget: int) -> bool:
    core_idx, _, _ = _k_core_raw(n, list(edges), k)
    if not core_idx:
        return False
    dense, _ = induced_hypergraph(edges[i] for i in core_idx)
    if k ** dense.order > coloring_budget:
        raise BudgetExceededError(
            f"{k}^{dense.order} colorings exceed budget {coloring_budget}"
        )
    return least_coloring(list(dense.sorted_edges()), dense.order, k) is None
