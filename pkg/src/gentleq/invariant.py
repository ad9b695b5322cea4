"""Threads, characteristic sequences, and the derived invariant.

For a valid bound quiver the arrows fall apart into maximal relation-avoiding
chains (permitted threads) and maximal relation chains (forbidden threads or
relation cycles); vertices with at most one arrow in and one arrow out
contribute trivial threads of either kind depending on whether every
composition through them is a relation.  Characteristic sequences are the
cyclic alternations of permitted and forbidden threads satisfying the five
local matching conditions, plus the pure relation cycles; the multiset of
their types ``(n, m)`` is invariant under derived equivalence and is the
workhorse used to separate equivalence classes.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    BoundQuiver,
    QuiverError,
    composition_successors,
    cycle_rank,
    relation_successors,
    require_valid,
    _index,
)

__all__ = [
    "Thread",
    "PairCycle",
    "ArrowCycle",
    "Phi",
    "PairingError",
    "PairingAmbiguous",
    "PairingIncomplete",
    "UnexpectedPhiTotal",
    "NONDEGENERATE",
    "DEGENERATE",
    "permitted_threads",
    "forbidden_threads",
    "arrow_cycle_sequences",
    "characteristic_sequences",
    "phi",
    "degeneracy_class",
    "cartan_matrix",
    "cartan_determinant",
    "euler_data",
]


class PairingError(QuiverError):
    pass


class PairingAmbiguous(PairingError):
    pass


class PairingIncomplete(PairingError):
    pass


class UnexpectedPhiTotal(QuiverError):
    pass


NONDEGENERATE = "nondegenerate"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Thread:
    """A permitted or forbidden thread.

    ``arrows`` is in traversal order (``arrows[0]`` is the starting arrow);
    trivial threads have no arrows and carry their vertex instead.
    """

    vertex: str | None
    arrows: tuple[str, ...]

    @property
    def trivial(self) -> bool:
        return not self.arrows

    def __len__(self) -> int:
        return len(self.arrows)

    def render(self) -> str:
        if self.trivial:
            return "e(%s)" % self.vertex
        # composite order, terminating arrow first
        return ".".join(reversed(self.arrows))


def _thread_key(t: Thread):
    return (0, t.vertex, ()) if t.trivial else (1, "", t.arrows)


def trivial_thread(vertex: str) -> Thread:
    return Thread(vertex, ())


def arrow_thread(arrows) -> Thread:
    arrows = tuple(arrows)
    if not arrows:
        raise ValueError("nontrivial thread needs arrows")
    return Thread(None, arrows)


@dataclass(frozen=True)
class PairCycle:
    """Cyclic sequence of (permitted, forbidden) thread pairs."""

    pairs: tuple[tuple[Thread, Thread], ...]

    def type(self) -> tuple[int, int]:
        return len(self.pairs), sum(len(t) for _, t in self.pairs)


@dataclass(frozen=True)
class ArrowCycle:
    """Cyclic arrow sequence all of whose consecutive pairs are relations."""

    arrows: tuple[str, ...]  # traversal order, rotated to the least arrow id

    def type(self) -> tuple[int, int]:
        return 0, len(self.arrows)


@dataclass(frozen=True)
class Phi:
    """Multiset of characteristic-sequence types, sorted by type."""

    entries: tuple[tuple[tuple[int, int], int], ...]

    @staticmethod
    def from_types(types) -> "Phi":
        counts = Counter(types)
        return Phi(tuple(sorted(counts.items())))

    @property
    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def lines(self) -> list[str]:
        out = ["(%d,%d): %d" % (n, m, c) for (n, m), c in self.entries]
        out.append("sum: %d" % self.total)
        return out

    def __str__(self) -> str:
        return "{" + ", ".join("(%d,%d):%d" % (n, m, c) for (n, m), c in self.entries) + "}"


def _single_successor(succ: dict[str, list[str]]) -> dict[str, str | None]:
    out = {}
    for a, lst in succ.items():
        assert len(lst) <= 1, "gentleness gives at most one successor"
        out[a] = lst[0] if lst else None
    return out


def _chains_and_cycles(succ1: dict[str, str | None]):
    """Decompose a partial-permutation graph on arrows."""
    pred = {}
    for a, b in succ1.items():
        if b is not None:
            assert b not in pred, "gentleness gives at most one predecessor"
            pred[b] = a
    chains = []
    on_chain = set()
    for a in sorted(succ1):
        if a in pred:
            continue
        chain = [a]
        cur = succ1[a]
        while cur is not None:
            chain.append(cur)
            cur = succ1[cur]
        chains.append(tuple(chain))
        on_chain.update(chain)
    cycles = []
    seen = set(on_chain)
    for a in sorted(succ1):
        if a in seen:
            continue
        cyc = [a]
        seen.add(a)
        cur = succ1[a]
        while cur != a:
            cyc.append(cur)
            seen.add(cur)
            cur = succ1[cur]
        start = min(range(len(cyc)), key=lambda i: cyc[i])
        cycles.append(tuple(cyc[start:] + cyc[:start]))
    return chains, cycles


def _trivial_vertices(bq: BoundQuiver, in_relations: bool) -> list[str]:
    idx = _index(bq.quiver)
    out = []
    for v in bq.vertices:
        if len(idx.out_of[v]) > 1 or len(idx.into[v]) > 1:
            continue
        comps = [
            (o, i) for o in idx.out_of[v] for i in idx.into[v]
        ]
        if all(((o, i) in bq.relations) == in_relations for o, i in comps):
            out.append(v)
    return out


def permitted_threads(bq: BoundQuiver) -> frozenset[Thread]:
    """Maximal relation-avoiding paths plus the qualifying trivial vertices."""
    require_valid(bq)
    chains, cycles = _chains_and_cycles(_single_successor(composition_successors(bq)))
    assert not cycles, "validated quivers have no relation-avoiding cycles"
    threads = {arrow_thread(c) for c in chains}
    threads.update(trivial_thread(v) for v in _trivial_vertices(bq, in_relations=False))
    return frozenset(threads)


def forbidden_threads(bq: BoundQuiver) -> frozenset[Thread]:
    """Maximal finite relation chains plus the qualifying trivial vertices."""
    require_valid(bq)
    chains, _cycles = _chains_and_cycles(_single_successor(relation_successors(bq)))
    threads = {arrow_thread(c) for c in chains}
    threads.update(trivial_thread(v) for v in _trivial_vertices(bq, in_relations=True))
    return frozenset(threads)


def arrow_cycle_sequences(bq: BoundQuiver) -> frozenset[ArrowCycle]:
    require_valid(bq)
    _chains, cycles = _chains_and_cycles(_single_successor(relation_successors(bq)))
    return frozenset(ArrowCycle(c) for c in cycles)


class _ThreadInfo:
    def __init__(self, bq: BoundQuiver):
        idx = _index(bq.quiver)
        self.src = {}
        self.tgt = {}
        self.start_arrow = {}
        self.end_arrow = {}
        for t in itertools.chain(permitted_threads(bq), forbidden_threads(bq)):
            if t.trivial:
                self.src[t] = self.tgt[t] = t.vertex
                self.start_arrow[t] = self.end_arrow[t] = None
            else:
                self.src[t] = idx.src_of[t.arrows[0]]
                self.tgt[t] = idx.tgt_of[t.arrows[-1]]
                self.start_arrow[t] = t.arrows[0]
                self.end_arrow[t] = t.arrows[-1]


_SEARCH_CAP = 1_000_000


def _pairings(bq: BoundQuiver):
    """All partitions of the threads into valid cyclic alternations.

    A valid solution uses every permitted thread exactly once in the sigma
    role and every forbidden thread exactly once in the tau role, satisfying
    the five matching conditions at every index.  Each cycle is rotated to
    start at its least permitted thread, so distinct solutions differ in
    substance, not in presentation.
    """
    permitted = sorted(permitted_threads(bq), key=_thread_key)
    forbidden = sorted(forbidden_threads(bq), key=_thread_key)
    info = _ThreadInfo(bq)
    has_arrows = bool(bq.arrows)
    solutions: list[tuple] = []
    steps = 0

    def tau_candidates(sigma, prev_tau, rem_f):
        for tau in sorted(rem_f, key=_thread_key):
            if info.tgt[tau] != info.tgt[sigma]:
                continue
            # condition (4)
            if not sigma.trivial and not tau.trivial and \
                    info.end_arrow[tau] == info.end_arrow[sigma]:
                continue
            # condition (3) for the previous index
            if prev_tau is not None and prev_tau.trivial and sigma.trivial \
                    and tau.trivial and has_arrows:
                continue
            yield tau

    def sigma_ok(prev_sigma, tau, sigma):
        if info.src[sigma] != info.src[tau]:
            return False
        # condition (5)
        if not tau.trivial and not sigma.trivial and \
                info.start_arrow[sigma] == info.start_arrow[tau]:
            return False
        # condition (2)
        if prev_sigma.trivial and tau.trivial and sigma.trivial and has_arrows:
            return False
        return True

    def close_ok(cycle):
        sigma1, tau1 = cycle[0]
        sigma_n, tau_n = cycle[-1]
        if not sigma_ok(sigma_n, tau_n, sigma1):
            return False
        # condition (3) at the wrap
        if tau_n.trivial and sigma1.trivial and tau1.trivial and has_arrows:
            return False
        return True

    def extend(rem_p, rem_f, done, cycle, pending_sigma):
        nonlocal steps
        steps += 1
        if steps > _SEARCH_CAP:
            raise PairingError("characteristic-sequence search exceeded its cap")
        if pending_sigma is not None:
            prev_tau = cycle[-1][1] if cycle else None
            for tau in tau_candidates(pending_sigma, prev_tau, rem_f):
                extend(rem_p, rem_f - {tau}, done, cycle + ((pending_sigma, tau),), None)
            return
        if cycle:
            if close_ok(cycle):
                extend(rem_p, rem_f, done + (cycle,), (), None)
            sigma_prev, tau_prev = cycle[-1]
            for sigma in sorted(rem_p, key=_thread_key):
                if sigma_ok(sigma_prev, tau_prev, sigma):
                    extend(rem_p - {sigma}, rem_f, done, cycle, sigma)
            return
        if not rem_p:
            if not rem_f:
                solutions.append(done)
            return
        # start the next cycle at the least remaining permitted thread
        sigma = min(rem_p, key=_thread_key)
        extend(rem_p - {sigma}, rem_f, done, (), sigma)

    extend(frozenset(permitted), frozenset(forbidden), (), (), None)
    if not solutions:
        raise PairingIncomplete(
            "no complete pairing of %d permitted and %d forbidden threads"
            % (len(permitted), len(forbidden))
        )
    normalized = {tuple(sorted(sol, key=lambda c: _thread_key(c[0][0]))) for sol in solutions}
    if len(normalized) > 1:
        raise PairingAmbiguous("%d distinct complete pairings found" % len(normalized))
    return [PairCycle(c) for c in normalized.pop()]


def characteristic_sequences(bq: BoundQuiver) -> tuple:
    """All characteristic sequences: thread alternations plus relation cycles."""
    require_valid(bq)
    pair_cycles = _pairings(bq)
    cycles = sorted(arrow_cycle_sequences(bq), key=lambda c: c.arrows)
    return tuple(pair_cycles) + tuple(cycles)


def phi(bq: BoundQuiver) -> Phi:
    """Multiset of the types of all characteristic sequences."""
    return Phi.from_types(cs.type() for cs in characteristic_sequences(bq))


def degeneracy_class(bq: BoundQuiver) -> str:
    """Split by the total number of characteristic sequences (3 or 1)."""
    require_valid(bq, require_connected=True)
    if cycle_rank(bq) != 2:
        raise QuiverError("degeneracy split applies to two-cycle quivers only")
    total = phi(bq).total
    if total == 3:
        return NONDEGENERATE
    if total == 1:
        return DEGENERATE
    raise UnexpectedPhiTotal(
        "two-cycle quiver with %d characteristic sequences (expected 1 or 3)" % total
    )


# ---------------------------------------------------------------------------
# path counting


def cartan_matrix(bq: BoundQuiver):
    """Counts of relation-avoiding paths between vertices.

    Returns ``(order, rows)`` where ``order`` is the sorted vertex tuple and
    ``rows[i][j]`` counts paths from ``order[i]`` to ``order[j]`` (the trivial
    path included on the diagonal).
    """
    require_valid(bq)
    order = tuple(sorted(bq.vertices))
    pos = {v: i for i, v in enumerate(order)}
    n = len(order)
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 1
    idx = _index(bq.quiver)
    succ1 = _single_successor(composition_successors(bq))
    for a in idx.src_of:
        i = pos[idx.src_of[a]]
        cur = a
        while cur is not None:
            rows[i][pos[idx.tgt_of[cur]]] += 1
            cur = succ1[cur]
    return order, tuple(tuple(r) for r in rows)


def _det_int(matrix) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _inverse_fractions(matrix):
    n = len(matrix)
    aug = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def euler_data(bq: BoundQuiver):
    """``(det C, det(E + E^T))`` with ``E`` the inverse transpose of the path
    count matrix, or ``None`` when that matrix is not invertible over the
    integers."""
    _, rows = cartan_matrix(bq)
    det_c = _det_int(rows)
    if det_c not in (1, -1):
        return None
    inv = _inverse_fractions(rows)
    n = len(rows)
    e = [[inv[j][i] for j in range(n)] for i in range(n)]  # transpose
    sym = []
    for i in range(n):
        row = []
        for j in range(n):
            x = e[i][j] + e[j][i]
            assert x.denominator == 1, "unimodular inverse must be integral"
            row.append(x.numerator)
        sym.append(row)
    return det_c, _det_int(sym)


def cartan_determinant(bq: BoundQuiver) -> int:
    return _det_int(cartan_matrix(bq)[1])
