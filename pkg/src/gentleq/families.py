"""Constructors and recognizers for the canonical algebra families.

Nine parameterized families: the two degenerate shapes (a cycle with a double
arrow, and its variant with the double arrow hanging off the cycle), the two
nondegenerate target shapes (one mixed cycle with two connectors, and two
oriented cycles joined by a path), two auxiliary shapes used for connector
surgery (six- and five-parameter variants), and three auxiliary double-arrow
shapes used in the degenerate reduction.  Builders follow explicit recipes;
``recognize`` inverts them up to isomorphism by brute force at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    BoundQuiver,
    QuiverError,
    canonical_key,
    cycle_rank,
    make_bound_quiver,
    require_valid,
)
from .invariant import Phi

__all__ = [
    "FamilySpec",
    "ConstraintViolation",
    "OutOfLemmaScope",
    "FAMILY_TAGS",
    "spec",
    "check_spec",
    "build_family",
    "recognize",
    "phi_formula",
    "theorem_list",
]

FAMILY_TAGS = ("G0", "G1", "G2", "L0", "L0p", "L1", "L2", "L2pFive", "L2pSix")

_PARAM_COUNT = {
    "L0": 2, "L0p": 2, "L1": 5, "L2": 5,
    "L2pSix": 6, "L2pFive": 5, "G0": 3, "G1": 4, "G2": 4,
}


class ConstraintViolation(QuiverError):
    pass


class OutOfLemmaScope(QuiverError):
    pass


@dataclass(frozen=True, order=True)
class FamilySpec:
    tag: str
    params: tuple[int, ...]

    def __str__(self) -> str:
        return "%s(%s)" % (self.tag, ",".join(str(p) for p in self.params))


def spec(tag: str, *params: int) -> FamilySpec:
    if tag not in FAMILY_TAGS:
        raise ConstraintViolation("unknown family tag %r" % tag)
    if len(params) != _PARAM_COUNT[tag]:
        raise ConstraintViolation(
            "%s takes %d parameters, got %d" % (tag, _PARAM_COUNT[tag], len(params))
        )
    return FamilySpec(tag, tuple(int(p) for p in params))


def check_spec(sp: FamilySpec) -> None:
    """Raise ConstraintViolation naming the first failed inequality."""
    if sp.tag not in FAMILY_TAGS:
        raise ConstraintViolation("unknown family tag %r" % sp.tag)
    if len(sp.params) != _PARAM_COUNT[sp.tag]:
        raise ConstraintViolation(
            "%s takes %d parameters, got %d"
            % (sp.tag, _PARAM_COUNT[sp.tag], len(sp.params))
        )
    p = sp.params

    def need(cond: bool, text: str):
        if not cond:
            raise ConstraintViolation("%s: needs %s" % (sp, text))

    if sp.tag in ("L0", "L0p"):
        pp, r = p
        need(pp >= 1, "p >= 1")
        need(0 <= r <= pp - 1, "r in [0, p-1]")
    elif sp.tag == "L1":
        p1, p2, p3, p4, r1 = p
        need(p1 >= 1 and p2 >= 1, "p1, p2 >= 1")
        need(p3 >= 0 and p4 >= 0, "p3, p4 >= 0")
        need(0 <= r1 <= p1 - 1, "r1 in [0, p1-1]")
        need(p2 + p3 >= 2, "p2 + p3 >= 2")
        need(p4 + r1 >= 1, "p4 + r1 >= 1")
    elif sp.tag == "L2":
        p1, p2, p3, r1, r2 = p
        need(p1 >= 1 and p2 >= 1, "p1, p2 >= 1")
        need(p3 >= 0, "p3 >= 0")
        need(0 <= r1 <= p1 - 1, "r1 in [0, p1-1]")
        need(0 <= r2 <= p2 - 1, "r2 in [0, p2-1]")
        need(p3 + r1 + r2 >= 1, "p3 + r1 + r2 >= 1")
    elif sp.tag == "L2pSix":
        p1, p2, p3, p4, r1, r2 = p
        need(p1 >= 1 and p2 >= 1, "p1, p2 >= 1")
        need(p3 >= 0 and p4 >= 0, "p3, p4 >= 0")
        need(0 <= r1 <= p1 - 1, "r1 in [0, p1-1]")
        need(0 <= r2 <= p2 - 1, "r2 in [0, p2-1]")
        need(p3 + p4 + r1 + r2 >= 1, "p3 + p4 + r1 + r2 >= 1")
    elif sp.tag == "L2pFive":
        p1, p2, p3, r1, r2 = p
        need(p1 >= 1 and p3 >= 1, "p1, p3 >= 1")
        need(p2 >= 2, "p2 >= 2")
        need(0 <= r1 <= p1 - 1, "r1 in [0, p1-1]")
        need(1 <= r2 <= p2 - 1, "r2 in [1, p2-1]")
    elif sp.tag == "G0":
        pp, q, r = p
        need(pp >= 1 and q >= 1, "p, q >= 1")
        need(0 <= r <= pp - 1, "r in [0, p-1]")
    else:  # G1, G2
        pp, q, r, rp = p
        need(pp >= 1 and q >= 1, "p, q >= 1")
        need(0 <= r <= pp - 1, "r in [0, p-1]")
        need(rp >= 0, "r' >= 0")


class _Builder:
    """Accumulates vertices, arrows and relations for one family instance."""

    def __init__(self):
        self.vertices: list[str] = []
        self.arrows: list[tuple[str, str, str]] = []
        self.relations: list[tuple[str, str]] = []

    def vertex(self, v: str) -> str:
        if v not in self.vertices:
            self.vertices.append(v)
        return v

    def arrow(self, a: str, s: str, t: str) -> str:
        self.vertex(s)
        self.vertex(t)
        self.arrows.append((a, s, t))
        return a

    def rel(self, first: str, second: str) -> None:
        self.relations.append((first, second))

    def path(self, prefix: str, length: int, start: str, end: str, base: int = 1):
        """Arrows ``prefix{base}..prefix{base+length-1}``, numbered from the
        ``end`` vertex backwards; interior vertices get upper-case names."""
        if length == 0:
            assert start == end, "a length-0 path needs identified endpoints"
            return {}
        names = {}
        for k in range(length + 1):
            if k == 0:
                names[k] = end
            elif k == length:
                names[k] = start
            else:
                names[k] = "%s%d" % (prefix.upper(), base + k - 1)
        ids = {}
        for k in range(1, length + 1):
            ids[base + k - 1] = self.arrow("%s%d" % (prefix, base + k - 1),
                                           names[k], names[k - 1])
        return ids

    def done(self, name: str) -> BoundQuiver:
        return make_bound_quiver(self.vertices, self.arrows, self.relations, name)


def _build_l0(pp, r):
    b = _Builder()
    for i in range(pp + 1):
        b.vertex("w%d" % i)
    for i in range(1, pp + 1):
        b.arrow("a%d" % i, "w%d" % i, "w%d" % (i - 1))
    b.arrow("b", "w0", "w%d" % pp)
    b.arrow("c", "w0", "w%d" % pp)
    b.rel("a%d" % pp, "b")
    b.rel("c", "a1")
    for i in range(1, r + 1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    return b.done("L0")


def _build_l0p(pp, r):
    b = _Builder()
    b.vertex("vl")
    b.vertex("vb")
    b.vertex("vc")
    b.path("a", pp, "vb", "vl")
    b.arrow("b", "vb", "vl")
    b.arrow("c", "vc", "vb")
    b.arrow("d", "vc", "vb")
    b.rel("a%d" % pp, "c")
    b.rel("b", "d")
    for i in range(1, r + 1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    return b.done("L0p")


def _build_l1(p1, p2, p3, p4, r1):
    b = _Builder()
    if p3 == 0 and p4 == 0:
        left = right = b.vertex("vc")
    else:
        left = b.vertex("vl")
        right = b.vertex("vr")
    if p3 == 0:
        mid = right
    elif p4 == 0:
        mid = left
    else:
        mid = b.vertex("vm")
    b.path("a", p1, left, right)
    b.path("b", p2, right, left)
    b.path("d", p4, left, mid)
    b.path("g", p3, right, mid)
    for i in range(p1 - r1, p1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    b.rel("a%d" % p1, "b1")
    b.rel("b%d" % p2, "a1")
    for i in range(1, p2):
        b.rel("b%d" % i, "b%d" % (i + 1))
    return b.done("L1")


def _build_l2(p1, p2, p3, r1, r2):
    b = _Builder()
    va = b.vertex("va")
    vb = va if p3 == 0 else b.vertex("vb")
    b.path("a", p1, va, va)
    b.path("b", p2, vb, vb)
    b.path("g", p3, vb, va)
    b.rel("a%d" % p1, "a1")
    for i in range(p1 - r1, p1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    b.rel("b%d" % p2, "b1")
    for i in range(p2 - r2, p2):
        b.rel("b%d" % i, "b%d" % (i + 1))
    return b.done("L2")


def _build_l2p_six(p1, p2, p3, p4, r1, r2):
    b = _Builder()
    va = b.vertex("va")
    if p3 == 0 and p4 == 0:
        vb = mid = va
    elif p3 == 0:
        vb = b.vertex("vb")
        mid = va
    elif p4 == 0:
        vb = b.vertex("vb")
        mid = vb
    else:
        vb = b.vertex("vb")
        mid = b.vertex("vm")
    b.path("a", p1, va, va)
    b.path("b", p2, vb, vb)
    b.path("g", p3, mid, va)
    b.path("d", p4, mid, vb)
    b.rel("a%d" % p1, "a1")
    for i in range(p1 - r1, p1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    b.rel("b%d" % p2, "b1")
    for i in range(p2 - r2, p2):
        b.rel("b%d" % i, "b%d" % (i + 1))
    return b.done("L2pSix")


def _build_l2p_five(p1, p2, p3, r1, r2):
    b = _Builder()
    vl = b.vertex("vl")
    vr = b.vertex("vr")
    vbot = b.vertex("vb")
    b.path("a", p1, vl, vr)
    b.arrow("b", vr, vl)
    b.path("g", p2, vr, vbot)
    b.path("d", p3, vl, vbot)
    for i in range(p1 - r1, p1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    b.rel("a%d" % p1, "b")
    b.rel("b", "a1")
    for i in range(1, r2 + 1):
        b.rel("g%d" % i, "g%d" % (i + 1))
    return b.done("L2pFive")


def _build_g0(pp, q, r):
    b = _Builder()
    vx, vy, vz = b.vertex("vx"), b.vertex("vy"), b.vertex("vz")
    b.path("a", pp, vy, vx)
    b.arrow("a%d" % (pp + 1), vz, vy)
    b.path("b", q, vy, vx)
    b.arrow("b%d" % (q + 1), vz, vy)
    for i in range(pp - r, pp + 1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    b.rel("b%d" % q, "b%d" % (q + 1))
    return b.done("G0")


def _build_g1(pp, q, r, rp):
    b = _Builder()
    vx, vy, vz = b.vertex("vx"), b.vertex("vy"), b.vertex("vz")
    b.path("a", pp, vy, vx)
    b.path("a", rp + 1, vz, vy, base=pp + 1)
    b.path("b", q, vy, vx)
    b.arrow("b%d" % (q + 1), vz, vy)
    for i in range(pp - r, pp + rp + 1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    b.rel("b%d" % q, "b%d" % (q + 1))
    return b.done("G1")


def _build_g2(pp, q, r, rp):
    b = _Builder()
    vx, vy, vz = b.vertex("vx"), b.vertex("vy"), b.vertex("vz")
    b.path("a", pp, vy, vx)
    b.arrow("a%d" % (pp + 1), vz, vy)
    b.path("b", q, vy, vx)
    b.path("b", rp + 1, vz, vy, base=q + 1)
    for i in range(pp - r, pp + 1):
        b.rel("a%d" % i, "a%d" % (i + 1))
    for i in range(q, q + rp + 1):
        b.rel("b%d" % i, "b%d" % (i + 1))
    return b.done("G2")


_BUILDERS = {
    "L0": _build_l0,
    "L0p": _build_l0p,
    "L1": _build_l1,
    "L2": _build_l2,
    "L2pSix": _build_l2p_six,
    "L2pFive": _build_l2p_five,
    "G0": _build_g0,
    "G1": _build_g1,
    "G2": _build_g2,
}


def build_family(sp: FamilySpec) -> BoundQuiver:
    """Build the bound quiver for a family instance (validated)."""
    check_spec(sp)
    bq = _BUILDERS[sp.tag](*sp.params)
    require_valid(bq, require_connected=True)
    assert len(bq.arrows) == len(bq.vertices) + 1, "families are two-cycle"
    assert cycle_rank(bq) == 2
    if sp.tag in ("G1", "G2") and sp.params[3] == 0:
        # the three double-arrow shapes coincide when the extra chain vanishes
        base = _build_g0(*sp.params[:3])
        assert canonical_key(bq) == canonical_key(base)
    return bq


def family_size(sp: FamilySpec) -> int:
    """Vertex count of the built quiver, without building it."""
    p = sp.params
    if sp.tag == "L0":
        return p[0] + 1
    if sp.tag == "L0p":
        return p[0] + 2
    if sp.tag == "L1":
        return p[0] + p[1] + p[2] + p[3] - 1
    if sp.tag == "L2":
        return p[0] + p[1] + p[2] - 1
    if sp.tag == "L2pSix":
        return p[0] + p[1] + p[2] + p[3] - 1
    if sp.tag == "L2pFive":
        return p[0] + p[1] + p[2]
    if sp.tag == "G0":
        return p[0] + p[1] + 1
    return p[0] + p[1] + p[3] + 1  # G1, G2


def _compositions(total, parts, minima):
    """All tuples of the given length with the given minima summing to total."""
    if parts == 1:
        if total >= minima[0]:
            yield (total,)
        return
    for first in range(minima[0], total - sum(minima[1:]) + 1):
        for rest in _compositions(total - first, parts - 1, minima[1:]):
            yield (first,) + rest


def _candidate_specs(n: int, n_arrows: int, n_rels: int):
    """All specs whose built quiver could have these size statistics."""
    if n_arrows != n + 1:
        return
    for tag in FAMILY_TAGS:
        if tag == "L0":
            pp = n - 1
            r = n_rels - 2
            if pp >= 1 and 0 <= r <= pp - 1:
                yield spec(tag, pp, r)
        elif tag == "L0p":
            pp = n - 2
            r = n_rels - 2
            if pp >= 1 and 0 <= r <= pp - 1:
                yield spec(tag, pp, r)
        elif tag == "L1":
            for p1, p2, p3, p4 in _compositions(n + 1, 4, (1, 1, 0, 0)):
                yield spec(tag, p1, p2, p3, p4, n_rels - p2 - 1)
        elif tag == "L2":
            for p1, p2, p3 in _compositions(n + 1, 3, (1, 1, 0)):
                for r1 in range(0, p1):
                    yield spec(tag, p1, p2, p3, r1, n_rels - 2 - r1)
        elif tag == "L2pSix":
            for p1, p2, p3, p4 in _compositions(n + 1, 4, (1, 1, 0, 0)):
                for r1 in range(0, p1):
                    yield spec(tag, p1, p2, p3, p4, r1, n_rels - 2 - r1)
        elif tag == "L2pFive":
            for p1, p2, p3 in _compositions(n, 3, (1, 2, 1)):
                for r1 in range(0, p1):
                    yield spec(tag, p1, p2, p3, r1, n_rels - 2 - r1)
        elif tag == "G0":
            r = n_rels - 2
            for pp, q in _compositions(n - 1, 2, (1, 1)):
                yield spec(tag, pp, q, r)
        else:  # G1, G2
            for pp, q, rp in _compositions(n - 1, 3, (1, 1, 0)):
                yield spec(tag, pp, q, n_rels - rp - 2, rp)


def _spec_checked(candidates):
    for sp in candidates:
        try:
            check_spec(sp)
        except ConstraintViolation:
            continue
        yield sp


def recognize(bq: BoundQuiver) -> FamilySpec | None:
    """The least family spec isomorphic to the given quiver, if any."""
    key = canonical_key(bq)
    n, a, r = len(bq.vertices), len(bq.arrows), len(bq.relations)
    matches = [
        sp for sp in _spec_checked(_candidate_specs(n, a, r))
        if canonical_key(build_family(sp)) == key
    ]
    return min(matches) if matches else None


def phi_formula(sp: FamilySpec) -> Phi:
    """Closed form of the derived invariant for the four classified families."""
    check_spec(sp)
    p = sp.params
    if sp.tag == "L0":
        pp, _r = p
        return Phi.from_types([(pp, pp + 2)])
    if sp.tag == "L0p":
        pp, r = p
        if r != 0:
            raise OutOfLemmaScope("closed form covers %s only at r = 0" % sp.tag)
        return Phi.from_types([(pp + 1, pp + 3)])
    if sp.tag == "L1":
        p1, p2, p3, p4, r1 = p
        return Phi.from_types([
            (p1 - r1 - 1, p1 + p2),
            (p2 + p3 - 1, p3),
            (r1 + p4, p4),
        ])
    if sp.tag == "L2":
        p1, p2, p3, r1, r2 = p
        return Phi.from_types([
            (p1 - r1 - 1, p1),
            (p2 - r2 - 1, p2),
            (r1 + r2 + p3, p3),
        ])
    raise OutOfLemmaScope("no closed form for %s" % sp.tag)


def theorem_list(max_vertices: int) -> list[FamilySpec]:
    """Every canonical-list spec whose quiver has at most the given size.

    Nondegenerate entries carry the classification's tie-break constraints so
    that no two listed specs are equivalent; degenerate entries are the
    double-arrow families (the primed one only at r = 0).
    """
    if max_vertices < 2:
        raise ValueError("max_vertices must be at least 2")
    out: list[FamilySpec] = []
    for pp in range(1, max_vertices):
        for r in range(0, pp):
            out.append(spec("L0", pp, r))
    for pp in range(1, max_vertices - 1):
        out.append(spec("L0p", pp, 0))
    for n in range(2, max_vertices + 1):
        for p1, p2, p3, p4 in _compositions(n + 1, 4, (1, 1, 0, 0)):
            for r1 in range(0, p1):
                if p2 + p3 < 2 or p4 + r1 < 1:
                    continue
                if p3 > p4 or (p3 == p4 and p2 > r1):
                    out.append(spec("L1", p1, p2, p3, p4, r1))
        for p1, p2, p3 in _compositions(n + 1, 3, (1, 1, 0)):
            if p1 < p2:
                continue
            for r1 in range(0, p1):
                for r2 in range(0, p2):
                    if p3 + r1 + r2 < 1:
                        continue
                    if p1 > p2 or r1 >= r2:
                        out.append(spec("L2", p1, p2, p3, r1, r2))
    return sorted(set(out))
