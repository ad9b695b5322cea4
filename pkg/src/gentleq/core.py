"""Bound quivers with quadratic monomial relations.

A quiver is a finite directed multigraph (loops and parallel arrows allowed)
with named vertices and arrows.  A bound quiver adds a set of relations, each
an ordered pair of arrows ``(first, second)`` standing for the length-two
composite "second, then first"; composability means
``source(first) == target(second)``.

This module holds the data model, the line-oriented text format, the
gentleness/finiteness validator, the cycle rank, the cycle/branch/connecting
arrow trichotomy, the opposite quiver, and isomorphism testing via canonical
labeling.  Everything is immutable and every operation is a pure function.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

__all__ = [
    "Quiver",
    "BoundQuiver",
    "Violation",
    "ArrowClass",
    "QuiverError",
    "QuiverSyntaxError",
    "NotConnectedError",
    "CycleRankError",
    "parse",
    "serialize",
    "validate",
    "require_valid",
    "is_connected",
    "cycle_rank",
    "classify_arrows",
    "opposite",
    "canonical_form",
    "canonical_key",
    "is_isomorphic",
]

_ID_RE = re.compile(r"^[A-Za-z0-9_]+$")


class QuiverError(Exception):
    """Base class for all errors raised by this package."""


class QuiverSyntaxError(QuiverError):
    """Malformed quiver text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class NotConnectedError(QuiverError):
    pass


class CycleRankError(QuiverError):
    pass


class InvalidQuiverError(QuiverError):
    """A gentleness/finiteness precondition failed; carries the violations."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__(
            "not a valid bound quiver: "
            + "; ".join(v.condition + " " + v.witness for v in self.violations)
        )


def _check_id(token: str, what: str) -> None:
    if not _ID_RE.match(token):
        raise ValueError("invalid %s identifier %r" % (what, token))


@dataclass(frozen=True)
class Quiver:
    """Vertices plus arrows ``(arrow id, source, target)``."""

    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            _check_id(v, "vertex")
            if v in seen:
                raise ValueError("duplicate vertex id %r" % v)
            seen.add(v)
        vset = seen
        seen = set()
        for a, s, t in self.arrows:
            _check_id(a, "arrow")
            if a in seen:
                raise ValueError("duplicate arrow id %r" % a)
            seen.add(a)
            if s not in vset or t not in vset:
                raise ValueError("arrow %r references unknown vertex" % a)

    def source(self, arrow: str) -> str:
        return _index(self).src_of[arrow]

    def target(self, arrow: str) -> str:
        return _index(self).tgt_of[arrow]


@dataclass(frozen=True)
class BoundQuiver:
    """A quiver together with length-two monomial relations."""

    quiver: Quiver
    relations: frozenset[tuple[str, str]]
    name: str = field(default="q", compare=False)

    def __post_init__(self):
        _check_id(self.name, "quiver name")
        idx = {a: (s, t) for a, s, t in self.quiver.arrows}
        for first, second in self.relations:
            if first not in idx or second not in idx:
                raise ValueError("relation references unknown arrow (%s, %s)" % (first, second))
            if idx[first][0] != idx[second][1]:
                raise ValueError(
                    "relation (%s, %s) not composable: source(%s)=%s but target(%s)=%s"
                    % (first, second, first, idx[first][0], second, idx[second][1])
                )

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.quiver.vertices

    @property
    def arrows(self) -> tuple[tuple[str, str, str], ...]:
        return self.quiver.arrows


def make_bound_quiver(vertices, arrows, relations, name="q") -> BoundQuiver:
    """Convenience constructor from plain iterables."""
    return BoundQuiver(
        Quiver(tuple(vertices), tuple((a, s, t) for a, s, t in arrows)),
        frozenset((f, s) for f, s in relations),
        name,
    )


class _Index:
    """Dense lookup tables shared by the algorithms in this package."""

    def __init__(self, q: Quiver):
        self.src_of = {a: s for a, s, t in q.arrows}
        self.tgt_of = {a: t for a, s, t in q.arrows}
        self.out_of = {v: [] for v in q.vertices}
        self.into = {v: [] for v in q.vertices}
        for a, s, t in q.arrows:
            self.out_of[s].append(a)
            self.into[t].append(a)


_INDEX_CACHE: dict[int, tuple[Quiver, _Index]] = {}


def _index(q: Quiver) -> _Index:
    # keyed by id(); fine because Quiver is immutable and the cache is small
    hit = _INDEX_CACHE.get(id(q))
    if hit is not None and hit[0] is q:
        return hit[1]
    idx = _Index(q)
    if len(_INDEX_CACHE) > 4096:
        _INDEX_CACHE.clear()
    _INDEX_CACHE[id(q)] = (q, idx)
    return idx


# ---------------------------------------------------------------------------
# text format


def parse(text: str) -> BoundQuiver:
    """Parse the line-oriented quiver format.

    Grammar (one block per file, ``#`` starts a comment, blank lines ignored)::

        quiver <name>
        vertex <id>
        arrow <id> <source-vertex> <target-vertex>
        rel <first-arrow> <second-arrow>
        end
    """
    name = None
    ended = False
    vertices: list[str] = []
    arrows: list[tuple[str, str, str]] = []
    relations: list[tuple[str, str]] = []
    vset: set[str] = set()
    aset: dict[str, tuple[str, str]] = {}
    rset: set[tuple[str, str]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        kw, args = words[0], words[1:]
        if ended:
            raise QuiverSyntaxError("content after 'end'", lineno)
        if kw == "quiver":
            if name is not None:
                raise QuiverSyntaxError("duplicate 'quiver' line", lineno)
            if len(args) != 1:
                raise QuiverSyntaxError("'quiver' takes one name", lineno)
            if not _ID_RE.match(args[0]):
                raise QuiverSyntaxError("invalid name %r" % args[0], lineno)
            name = args[0]
            continue
        if name is None:
            raise QuiverSyntaxError("expected 'quiver <name>' first", lineno)
        if kw == "vertex":
            if len(args) != 1:
                raise QuiverSyntaxError("'vertex' takes one id", lineno)
            if not _ID_RE.match(args[0]):
                raise QuiverSyntaxError("invalid vertex id %r" % args[0], lineno)
            if args[0] in vset:
                raise QuiverSyntaxError("duplicate vertex id %r" % args[0], lineno)
            vset.add(args[0])
            vertices.append(args[0])
        elif kw == "arrow":
            if len(args) != 3:
                raise QuiverSyntaxError("'arrow' takes id, source, target", lineno)
            a, s, t = args
            for tok in args:
                if not _ID_RE.match(tok):
                    raise QuiverSyntaxError("invalid identifier %r" % tok, lineno)
            if a in aset:
                raise QuiverSyntaxError("duplicate arrow id %r" % a, lineno)
            if s not in vset:
                raise QuiverSyntaxError("unknown source vertex %r" % s, lineno)
            if t not in vset:
                raise QuiverSyntaxError("unknown target vertex %r" % t, lineno)
            aset[a] = (s, t)
            arrows.append((a, s, t))
        elif kw == "rel":
            if len(args) != 2:
                raise QuiverSyntaxError("'rel' takes two arrow ids", lineno)
            f, s2 = args
            if f not in aset:
                raise QuiverSyntaxError("unknown arrow %r" % f, lineno)
            if s2 not in aset:
                raise QuiverSyntaxError("unknown arrow %r" % s2, lineno)
            if aset[f][0] != aset[s2][1]:
                raise QuiverSyntaxError(
                    "relation (%s, %s) not composable: target of %s is %s, source of %s is %s"
                    % (f, s2, s2, aset[s2][1], f, aset[f][0]),
                    lineno,
                )
            if (f, s2) in rset:
                raise QuiverSyntaxError("duplicate relation (%s, %s)" % (f, s2), lineno)
            rset.add((f, s2))
            relations.append((f, s2))
        elif kw == "end":
            if args:
                raise QuiverSyntaxError("'end' takes no arguments", lineno)
            ended = True
        else:
            raise QuiverSyntaxError("unknown directive %r" % kw, lineno)

    if name is None:
        raise QuiverSyntaxError("missing 'quiver <name>' header")
    if not ended:
        raise QuiverSyntaxError("missing 'end'")
    return BoundQuiver(Quiver(tuple(vertices), tuple(arrows)), frozenset(relations), name)


def serialize(bq: BoundQuiver) -> str:
    """Deterministic text form: sections in fixed order, lines sorted."""
    lines = ["quiver %s" % bq.name]
    lines += ["vertex %s" % v for v in sorted(bq.vertices)]
    lines += ["arrow %s %s %s" % (a, s, t) for a, s, t in sorted(bq.arrows)]
    lines += ["rel %s %s" % (f, s) for f, s in sorted(bq.relations)]
    lines.append("end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    condition: str  # G1 | G3 | G4 | FIN | CONN
    witness: str


def composition_successors(bq: BoundQuiver) -> dict[str, list[str]]:
    """arrow -> arrows that may follow it (composable, pair not a relation)."""
    idx = _index(bq.quiver)
    succ: dict[str, list[str]] = {}
    for a in idx.src_of:
        t = idx.tgt_of[a]
        succ[a] = [b for b in idx.out_of[t] if (b, a) not in bq.relations]
    return succ


def relation_successors(bq: BoundQuiver) -> dict[str, list[str]]:
    """arrow -> arrows that follow it through a relation."""
    idx = _index(bq.quiver)
    succ: dict[str, list[str]] = {}
    for a in idx.src_of:
        t = idx.tgt_of[a]
        succ[a] = [b for b in idx.out_of[t] if (b, a) in bq.relations]
    return succ


def _find_cycle(succ: dict[str, list[str]]) -> list[str] | None:
    """Return some directed cycle in the graph on arrows, or None."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {a: WHITE for a in succ}
    for start in sorted(succ):
        if color[start] != WHITE:
            continue
        stack = [(start, iter(succ[start]))]
        path = [start]
        color[start] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GRAY:
                    return path[path.index(nxt):]
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    path.append(nxt)
                    stack.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()
    return None


def is_connected(bq: BoundQuiver) -> bool:
    """Weak connectivity of the underlying graph (true for the empty quiver)."""
    verts = bq.vertices
    if len(verts) <= 1:
        return True
    idx = _index(bq.quiver)
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        v = stack.pop()
        for a in idx.out_of[v]:
            w = idx.tgt_of[a]
            if w not in seen:
                seen.add(w)
                stack.append(w)
        for a in idx.into[v]:
            w = idx.src_of[a]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(verts)


def validate(bq: BoundQuiver, require_connected: bool = False) -> tuple[Violation, ...]:
    """Check gentleness and finite-dimensionality; empty result means valid.

    G1: every vertex has at most two outgoing and two incoming arrows.
    G3: every arrow has at most one composable continuation (either side)
        avoiding the relations.
    G4: ... and at most one hitting a relation.
    FIN: no oriented cycle of arrows avoiding the relations at every
        cyclically consecutive pair (otherwise arbitrarily long nonzero paths
        would exist).
    CONN (optional): underlying graph connected.
    """
    idx = _index(bq.quiver)
    out: list[Violation] = []
    for v in bq.vertices:
        if len(idx.out_of[v]) > 2:
            out.append(Violation("G1", "vertex %s has %d outgoing arrows" % (v, len(idx.out_of[v]))))
        if len(idx.into[v]) > 2:
            out.append(Violation("G1", "vertex %s has %d incoming arrows" % (v, len(idx.into[v]))))
    for a in sorted(idx.src_of):
        s, t = idx.src_of[a], idx.tgt_of[a]
        before_free = [b for b in idx.into[s] if (a, b) not in bq.relations]
        after_free = [b for b in idx.out_of[t] if (b, a) not in bq.relations]
        before_rel = [b for b in idx.into[s] if (a, b) in bq.relations]
        after_rel = [b for b in idx.out_of[t] if (b, a) in bq.relations]
        if len(before_free) > 1:
            out.append(Violation("G3", "arrow %s has free predecessors %s" % (a, ",".join(sorted(before_free)))))
        if len(after_free) > 1:
            out.append(Violation("G3", "arrow %s has free successors %s" % (a, ",".join(sorted(after_free)))))
        if len(before_rel) > 1:
            out.append(Violation("G4", "arrow %s has relation predecessors %s" % (a, ",".join(sorted(before_rel)))))
        if len(after_rel) > 1:
            out.append(Violation("G4", "arrow %s has relation successors %s" % (a, ",".join(sorted(after_rel)))))
    cycle = _find_cycle(composition_successors(bq))
    if cycle is not None:
        out.append(Violation("FIN", "relation-avoiding cycle %s" % ",".join(cycle)))
    if require_connected and not is_connected(bq):
        out.append(Violation("CONN", "underlying graph is disconnected"))
    return tuple(out)


def require_valid(bq: BoundQuiver, require_connected: bool = False) -> None:
    violations = validate(bq, require_connected)
    if violations:
        raise InvalidQuiverError(violations)


# ---------------------------------------------------------------------------
# structure


def cycle_rank(bq: BoundQuiver) -> int:
    """Number of arrows minus vertices plus one, for a connected quiver."""
    if not is_connected(bq):
        raise NotConnectedError("cycle rank is only defined for connected quivers")
    return len(bq.arrows) - len(bq.vertices) + 1


class ArrowClass:
    CYCLE = "cycle"
    BRANCH = "branch"
    CONNECTING = "connecting"


def _component_sizes(vertices, arrows):
    """Sizes (vertex count, arrow count) of weak components."""
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for _, s, t in arrows:
        rs, rt = find(s), find(t)
        if rs != rt:
            parent[rs] = rt
    sizes: dict[str, list[int]] = {}
    for v in vertices:
        sizes.setdefault(find(v), [0, 0])[0] += 1
    for _, s, _t in arrows:
        sizes[find(s)][1] += 1
    return [tuple(x) for x in sizes.values()]


def classify_arrows(bq: BoundQuiver):
    """Delete-one-arrow trichotomy plus the connecting vertices.

    An arrow is a cycle arrow when deleting it leaves the quiver connected, a
    branch arrow when one remaining component still has two independent
    cycles, and a connecting arrow when the quiver splits into two one-cycle
    components.  A connecting vertex meets at least three non-branch arrow
    ends (a loop contributes both of its ends).
    """
    if cycle_rank(bq) != 2:
        raise CycleRankError("arrow classification needs cycle rank 2, got %d" % cycle_rank(bq))
    classes: dict[str, str] = {}
    for a, s, t in bq.arrows:
        rest = [arr for arr in bq.arrows if arr[0] != a]
        comps = _component_sizes(bq.vertices, rest)
        if len(comps) == 1:
            classes[a] = ArrowClass.CYCLE
        elif any(ac == vc + 1 for vc, ac in comps):
            classes[a] = ArrowClass.BRANCH
        else:
            classes[a] = ArrowClass.CONNECTING
    ends: dict[str, int] = {v: 0 for v in bq.vertices}
    for a, s, t in bq.arrows:
        if classes[a] == ArrowClass.BRANCH:
            continue
        ends[s] += 1
        ends[t] += 1
    connecting = frozenset(v for v, k in ends.items() if k >= 3)
    return classes, connecting


def opposite(bq: BoundQuiver) -> BoundQuiver:
    """Reverse every arrow and swap every relation pair."""
    return BoundQuiver(
        Quiver(bq.vertices, tuple((a, t, s) for a, s, t in bq.arrows)),
        frozenset((s, f) for f, s in bq.relations),
        bq.name,
    )


# ---------------------------------------------------------------------------
# canonical labeling


def _refined_colors(bq: BoundQuiver):
    """Isomorphism-invariant vertex colors (degree data refined by neighbors)."""
    verts = bq.vertices
    n = len(verts)
    pos = {v: i for i, v in enumerate(verts)}
    out_n = [[] for _ in range(n)]
    in_n = [[] for _ in range(n)]
    loops = [0] * n
    for a, s, t in bq.arrows:
        out_n[pos[s]].append(pos[t])
        in_n[pos[t]].append(pos[s])
        if s == t:
            loops[pos[s]] += 1
    junction = [0] * n
    src = {a: s for a, s, t in bq.arrows}
    for first, _second in bq.relations:
        junction[pos[src[first]]] += 1
    colors = [
        (len(out_n[i]), len(in_n[i]), loops[i], junction[i]) for i in range(n)
    ]
    while True:
        sigs = [
            (
                colors[i],
                tuple(sorted(colors[j] for j in out_n[i])),
                tuple(sorted(colors[j] for j in in_n[i])),
            )
            for i in range(n)
        ]
        ranking = {sig: r for r, sig in enumerate(sorted(set(sigs)))}
        new = [(ranking[sigs[i]],) for i in range(n)]
        if len(set(new)) == len(set(colors)):
            return {verts[i]: colors[i] for i in range(n)}
        colors = new


def _orderings(bq: BoundQuiver):
    """All vertex orderings compatible with the color refinement."""
    colors = _refined_colors(bq)
    classes: dict = {}
    for v in sorted(bq.vertices):
        classes.setdefault(colors[v], []).append(v)
    groups = [classes[c] for c in sorted(classes)]
    for combo in itertools.product(*[itertools.permutations(g) for g in groups]):
        yield tuple(itertools.chain.from_iterable(combo))


def canonical_form(bq: BoundQuiver) -> BoundQuiver:
    """Relabel onto v0..v{n-1} / a0..a{k-1}, minimal over all relabelings.

    Two bound quivers are isomorphic exactly when their canonical forms are
    equal.  Minimization runs over the color-respecting vertex orderings and,
    within each parallel-arrow bundle, over the arrow orderings.
    """
    arrows = bq.arrows
    best = None
    best_assignment = None
    for order in _orderings(bq):
        pos = {v: i for i, v in enumerate(order)}
        endpoints = sorted((pos[s], pos[t], a) for a, s, t in arrows)
        base = tuple((s, t) for s, t, _ in endpoints)
        if best is not None and base > best[0]:
            continue
        if best is not None and base < best[0]:
            best = None
        # bundles of parallel arrows are interchangeable a priori; relations
        # decide their order
        bundles: list[list[str]] = []
        for _, group in itertools.groupby(endpoints, key=lambda e: (e[0], e[1])):
            bundles.append([a for _, _, a in group])
        for perm_combo in itertools.product(*[itertools.permutations(b) for b in bundles]):
            flat = list(itertools.chain.from_iterable(perm_combo))
            apos = {a: i for i, a in enumerate(flat)}
            rels = tuple(sorted((apos[f], apos[s]) for f, s in bq.relations))
            cand = (base, rels)
            if best is None or cand < best:
                best = cand
                best_assignment = (order, tuple(flat))
    if best is None:  # no vertices
        return BoundQuiver(Quiver((), ()), frozenset(), "c")
    order, flat = best_assignment
    pos = {v: i for i, v in enumerate(order)}
    apos = {a: i for i, a in enumerate(flat)}
    src = {a: s for a, s, t in arrows}
    tgt = {a: t for a, s, t in arrows}
    new_arrows = tuple(
        ("a%d" % i, "v%d" % pos[src[a]], "v%d" % pos[tgt[a]]) for i, a in enumerate(flat)
    )
    new_verts = tuple("v%d" % i for i in range(len(order)))
    new_rels = frozenset(("a%d" % apos[f], "a%d" % apos[s]) for f, s in bq.relations)
    return BoundQuiver(Quiver(new_verts, new_arrows), new_rels, "c")


def canonical_key(bq: BoundQuiver) -> str:
    """Serialization of the canonical form; equal keys iff isomorphic."""
    return serialize(canonical_form(bq))


def compact_key(bq: BoundQuiver) -> str:
    """One-line isomorphism invariant, for report lines and logs."""
    c = canonical_form(bq)
    apos = {a: i for i, (a, _s, _t) in enumerate(c.arrows)}
    arcs = ",".join("%s-%s" % (s[1:], t[1:]) for _a, s, t in c.arrows)
    rels = ",".join(sorted("%d.%d" % (apos[f], apos[s]) for f, s in c.relations))
    return "%d;%s;%s" % (len(c.vertices), arcs, rels)


def is_isomorphic(a: BoundQuiver, b: BoundQuiver) -> bool:
    return canonical_key(a) == canonical_key(b)
