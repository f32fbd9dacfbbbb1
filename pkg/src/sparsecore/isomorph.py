"""Canonical keys, automorphism counts and copy counting for small structures.

Formulas are isomorphic under signed variable permutations (relabel the
variables and optionally swap a variable's two literals: a group of size
2^t * t! on support size t); hypergraphs under vertex permutations.  Keys
are exact: equal keys iff isomorphic.

Two engines compute the same canonical form.  For small supports the full
orbit of the labeled structure is enumerated with numpy (which also gives
the automorphism count via orbit-stabilizer and, for enumeration, the set
of all labeled images).  Above the orbit limit a pruned branch-and-bound
search over label assignments is used.  Both minimize the same encoding:
clauses written as descending literal-id tuples, listed in ascending
order.  Isolated variables are split off first; they only contribute a
count to the key and a factorial (times 2^m for formulas) to the
automorphism count.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .structures import (
    BudgetExceededError,
    Clause,
    Formula,
    Hypergraph,
    induced_formula,
    induced_hypergraph,
)

DEFAULT_ORDER_CAP = 16
_FORMULA_ORBIT_MAX = 7
_HYPERGRAPH_ORBIT_MAX = 8


# ---------------------------------------------------------------------------
# literal-id plumbing.  Formula literal ids on support size t are
# 2*(v-1) + (0 if positive else 1); hypergraph ids are v-1.

def _formula_rows(formula: Formula) -> tuple[int, list[tuple[int, ...]], int]:
    """(support size, clause id-rows on the dense support, isolated count)."""
    dense, support = induced_formula(formula.clauses)
    rows = [
        tuple(2 * (abs(l) - 1) + (0 if l > 0 else 1) for l in cl.literals)
        for cl in dense.sorted_clauses()
    ]
    return dense.order, rows, formula.order - dense.order


def _hypergraph_rows(graph: Hypergraph) -> tuple[int, list[tuple[int, ...]], int]:
    dense, support = induced_hypergraph(graph.edges)
    rows = [tuple(v - 1 for v in e) for e in dense.sorted_edges()]
    return dense.order, rows, graph.order - dense.order


def _desc_clause(ids) -> tuple[int, ...]:
    return tuple(sorted(ids, reverse=True))


def _encode_rows(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(_desc_clause(r) for r in rows))


# ---------------------------------------------------------------------------
# orbit engine

@lru_cache(maxsize=None)
def _signed_lit_maps(t: int) -> np.ndarray:
    """(2^t * t!, 2t) array: image of each literal id under each group element."""
    perms = np.array(list(itertools.permutations(range(t))), dtype=np.int8)
    flips = ((np.arange(2 ** t, dtype=np.uint32)[:, None] >> np.arange(t)) & 1).astype(np.int8)
    maps = np.empty((len(perms), 2 ** t, 2 * t), dtype=np.int8)
    for lit in range(2 * t):
        v, s = divmod(lit, 2)
        maps[:, :, lit] = perms[:, v][:, None] * 2 + (flips[:, v][None, :] ^ s)
    return maps.reshape(-1, 2 * t)


@lru_cache(maxsize=None)
def _perm_maps(t: int) -> np.ndarray:
    """(t!, t) array: image of each vertex id under each permutation."""
    return np.array(list(itertools.permutations(range(t))), dtype=np.int8)


def _orbit_rows(t: int, rows: list[tuple[int, ...]], signed: bool) -> np.ndarray:
    """Distinct labeled images as packed int64 rows, sorted; one row per image."""
    r = len(rows[0])
    base = 2 * t if signed else t
    maps = _signed_lit_maps(t) if signed else _perm_maps(t)
    mapped = maps[:, np.array(rows, dtype=np.int64)]          # (G, e, r)
    mapped = np.sort(mapped, axis=2)[:, :, ::-1]              # descending literals
    weights = base ** np.arange(r - 1, -1, -1, dtype=np.int64)
    keys = mapped.astype(np.int64) @ weights                  # (G, e)
    keys.sort(axis=1)
    return np.unique(keys, axis=0)


def _pack_row(ids, base: int) -> int:
    key = 0
    for l in _desc_clause(ids):
        key = key * base + l
    return key


def _unpack_row(key: int, base: int, r: int) -> tuple[int, ...]:
    out = []
    for _ in range(r):
        key, l = divmod(key, base)
        out.append(l)
    return tuple(reversed(out))  # descending literal ids


def _decode_orbit_row(row, base: int, r: int) -> tuple[tuple[int, ...], ...]:
    return tuple(_unpack_row(int(k), base, r) for k in row)


# ---------------------------------------------------------------------------
# branch-and-bound engine (any widths, any support size)

def _canonical_dfs(t: int, rows: list[tuple[int, ...]], signed: bool):
    """Minimum encoding over the group, plus the automorphism count.

    Assigns new labels 1..t to variables one at a time; a clause is
    emitted when its last variable is labeled, so the emitted key stream
    is ascending and prefixes compare against the incumbent best.
    """
    clause_lits = [[(l // 2, l % 2) if signed else (l, 0) for l in row] for row in rows]
    by_var: list[list[int]] = [[] for _ in range(t)]
    for ci, lits in enumerate(clause_lits):
        for v, _ in lits:
            by_var[v].append(ci)
    flips = (0, 1) if signed else (0,)
    e_total = len(rows)
    best: list[tuple[int, ...]] | None = None
    best_count = 0
    label = [-1] * t
    flip = [0] * t
    missing = [len(lits) for lits in clause_lits]

    def clause_key(ci: int) -> tuple[int, ...]:
        if signed:
            ids = [2 * label[v] + (s ^ flip[v]) for v, s in clause_lits[ci]]
        else:
            ids = [label[v] for v, _ in clause_lits[ci]]
        return _desc_clause(ids)

    def rec(step: int, stream: list):
        nonlocal best, best_count
        if step == t:
            if best is None or stream < best:
                best = list(stream)
                best_count = 1
            elif stream == best:
                best_count += 1
            return
        candidates = []
        for u in range(t):
            if label[u] != -1:
                continue
            for f in flips:
                label[u] = step
                flip[u] = f
                block = sorted(clause_key(ci) for ci in by_var[u] if missing[ci] == 1)
                label[u] = -1
                flip[u] = 0
                candidates.append((block, u, f))
        candidates.sort(key=lambda c: c[0])
        for block, u, f in candidates:
            if best is not None:
                # lexicographic verdict of (stream + block) against the incumbent
                pos = len(stream)
                prune = False
                for j in range(pos + len(block)):
                    key = stream[j] if j < pos else block[j - pos]
                    if key != best[j]:
                        prune = key > best[j]
                        break
                if prune:
                    continue
            label[u] = step
            flip[u] = f
            for ci in by_var[u]:
                missing[ci] -= 1
            stream.extend(block)
            rec(step + 1, stream)
            del stream[len(stream) - len(block):]
            for ci in by_var[u]:
                missing[ci] += 1
            label[u] = -1
            flip[u] = 0
        return

    rec(0, [])
    assert best is not None
    return tuple(best), best_count


# ---------------------------------------------------------------------------
# dispatch

def _support_canonical(t, rows, signed, orbit_max):
    """(encoding, support automorphism count) for a structure with no isolates."""
    if t == 0:
        return (), 1
    widths = {len(r) for r in rows}
    if t <= orbit_max and len(widths) == 1:
        r = widths.pop()
        base = 2 * t if signed else t
        uniq = _orbit_rows(t, rows, signed)
        group = (2 ** t if signed else 1) * factorial(t)
        aut = group // len(uniq)
        return _decode_orbit_row(uniq[0], base, r), aut
    return _canonical_dfs(t, rows, signed)


def _render(kind: str, t: int, isolated: int, encoding) -> bytes:
    body = ";".join(",".join(map(str, cl)) for cl in encoding)
    return f"{kind}|{t}|{isolated}|{body}".encode("ascii")


def canonical_key(structure, order_cap: int = DEFAULT_ORDER_CAP) -> bytes:
    """Deterministic key equal for two structures iff they are isomorphic."""
    if isinstance(structure, Formula):
        kind, parts, signed, omax = "F", _formula_rows(structure), True, _FORMULA_ORBIT_MAX
    elif isinstance(structure, Hypergraph):
        kind, parts, signed, omax = "G", _hypergraph_rows(structure), False, _HYPERGRAPH_ORBIT_MAX
    else:
        raise TypeError(f"cannot canonicalize {type(structure).__name__}")
    t, rows, isolated = parts
    if structure.order > order_cap:
        raise BudgetExceededError(
            f"order {structure.order} exceeds canonicalization cap {order_cap}"
        )
    encoding, _ = _support_canonical(t, rows, signed, omax)
    return _render(kind, t, isolated, encoding)


def automorphism_count(structure, order_cap: int = DEFAULT_ORDER_CAP) -> int:
    """Size of the automorphism group (signed permutations for formulas)."""
    if isinstance(structure, Formula):
        t, rows, isolated = _formula_rows(structure)
        signed, omax = True, _FORMULA_ORBIT_MAX
        iso_factor = 2 ** isolated * factorial(isolated)
    elif isinstance(structure, Hypergraph):
        t, rows, isolated = _hypergraph_rows(structure)
        signed, omax = False, _HYPERGRAPH_ORBIT_MAX
        iso_factor = factorial(isolated)
    else:
        raise TypeError(f"cannot count automorphisms of {type(structure).__name__}")
    if structure.order > order_cap:
        raise BudgetExceededError(
            f"order {structure.order} exceeds canonicalization cap {order_cap}"
        )
    _, aut = _support_canonical(t, rows, signed, omax)
    return aut * iso_factor


def distinct_relabelings(structure):
    """All distinct labeled forms of a structure on its own (dense) support.

    Requires no isolated variables and a support within the orbit limit.
    The list has length group_size / automorphism_count.
    """
    if isinstance(structure, Formula):
        t, rows, isolated = _formula_rows(structure)
        signed, omax = True, _FORMULA_ORBIT_MAX
    elif isinstance(structure, Hypergraph):
        t, rows, isolated = _hypergraph_rows(structure)
        signed, omax = False, _HYPERGRAPH_ORBIT_MAX
    else:
        raise TypeError(f"cannot relabel {type(structure).__name__}")
    if isolated:
        raise ValueError("structure has isolated variables")
    if t == 0:
        return [structure]
    if t > omax:
        raise BudgetExceededError(f"support {t} exceeds orbit limit {omax}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError("mixed clause widths")
    r = widths.pop()
    base = 2 * t if signed else t
    out = []
    for row in _orbit_rows(t, rows, signed):
        clause_rows = _decode_orbit_row(row, base, r)
        if signed:
            out.append(Formula(t, [_ids_to_clause(cl) for cl in clause_rows]))
        else:
            out.append(Hypergraph(t, [tuple(sorted(l + 1 for l in cl)) for cl in clause_rows]))
    return out


def _ids_to_clause(ids) -> Clause:
    return Clause(tuple((l // 2 + 1) * (1 if l % 2 == 0 else -1) for l in ids))


# ---------------------------------------------------------------------------
# copy counting

def count_copies(pattern, host, order_cap: int = DEFAULT_ORDER_CAP) -> int:
    """Number of distinct substructures of ``host`` isomorphic to ``pattern``.

    A substructure is a variable subset together with a clause subset over
    it; isolated variables of the pattern are matched by arbitrary extra
    host variables.
    """
    if isinstance(pattern, Formula):
        if not isinstance(host, Formula):
            raise TypeError("pattern and host must be the same kind")
        return _count_copies(pattern, host, order_cap, formula=True)
    if isinstance(pattern, Hypergraph):
        if not isinstance(host, Hypergraph):
            raise TypeError("pattern and host must be the same kind")
        return _count_copies(pattern, host, order_cap, formula=False)
    raise TypeError(f"cannot count copies of {type(pattern).__name__}")


def _count_copies(pattern, host, order_cap, formula: bool) -> int:
    if pattern.order > host.order or pattern.size > host.size:
        return 0
    support_size = len(pattern.support)
    isolated = pattern.order - support_size
    if pattern.size == 0:
        return comb(host.order, pattern.order)
    if formula:
        core, _ = induced_formula(pattern.clauses)
    else:
        core, _ = induced_hypergraph(pattern.edges)
    target = canonical_key(core, order_cap)
    items = host.sorted_clauses() if formula else host.sorted_edges()
    count = 0
    for subset in itertools.combinations(items, pattern.size):
        if formula:
            used = {v for cl in subset for v in cl.variables}
        else:
            used = {v for e in subset for v in e}
        if len(used) != support_size:
            continue
        sub, _ = induced_formula(subset) if formula else induced_hypergraph(subset)
        if canonical_key(sub, order_cap) == target:
            count += comb(host.order - support_size, isolated)
    return count
