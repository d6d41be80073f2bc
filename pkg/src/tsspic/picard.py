"""Picard and static Picard groups of a TSS, and arithmetic on their elements.

The Picard group is the semidirect product

    (prod over curves T  x  prod over leaves M(L)) x| G

with one circle of modular-flow translations per zero curve, the mapping
class group of each leaf fixing its zero-curve boundary, and the group G of
label-preserving automorphisms of the leaf graph acting by permutation.

Action convention: ``m in G`` carries curve ``c`` to ``m(c)`` and leaf ``L``
to ``m(L)``.  If ``m`` reverses orientation, boundary-twist integers are
negated and every PMod generator letter is inverted; modular angles are
never negated, since the modular field on the zero set is preserved.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import DEFAULT_MAX_VERTICES, AutomorphismGroup, GraphMap, automorphism_group
from .mcg import (
    FreeWord,
    GroupDescription,
    SurfaceType,
    free_reduce,
    group,
    mcg_structure,
    pmod_generators,
    pmod_word_homology,
    torus,
)
from .model import LabeledGraph, TssSurface, build_graph, ensure_valid, format_rational, parse_rational


class DescriptionMismatch(ValueError):
    pass


def leaf_surface_type(s: TssSurface, leaf_id: str) -> SurfaceType:
    """The leaf as a bordered surface, its zero curves held fixed."""
    lf = s.leaf(leaf_id)
    return SurfaceType(lf.genus, len(s.incident_curves(leaf_id)), lf.free_boundary)


@dataclass(frozen=True)
class PicardGroupDescription:
    surface: TssSurface
    graph: LabeledGraph
    torus_factors: dict
    leaf_factors: dict
    outer: AutomorphismGroup
    action_note: str = ""

    def normal_part(self) -> GroupDescription:
        """The abelian-by-PMod kernel of the map to G."""
        atoms = [torus(p) for p in self.torus_factors.values()]
        for d in self.leaf_factors.values():
            atoms.extend(d.atoms)
        return GroupDescription.product(atoms)

    def pretty(self) -> str:
        inner = self.normal_part().pretty()
        if self.outer.order == 1:
            return inner
        return f"({inner}) ⋊ {self.outer.name()}"

    def incident(self, leaf_id: str) -> tuple[str, ...]:
        return self.surface.incident_curves(leaf_id)

    def pmod_rank(self, leaf_id: str) -> int:
        st = leaf_surface_type(self.surface, leaf_id)
        return len(pmod_generators(st.genus, st.fixed_boundary))

    def to_json(self) -> dict:
        return {
            "pretty": self.pretty(),
            "torus_factors": {c: format_rational(p) for c, p in self.torus_factors.items()},
            "leaf_factors": {lf: d.to_json() for lf, d in self.leaf_factors.items()},
            "normal_part": self.normal_part().to_json(),
            "outer": {
                "order": self.outer.order,
                "name": self.outer.name(),
                "elements": [m.to_json() for m in self.outer.elements],
                "generators": [m.to_json() for m in self.outer.generators],
            },
            "action_note": self.action_note,
            "relations": [
                "Pic(P) = M(P, pi) = Out Poiss(P)",
                "1 -> StatPic(P) -> Pic(P) -> Aut(leaf space)",
            ],
        }


def _action_note(d_graph: LabeledGraph, outer: AutomorphismGroup) -> str:
    parts = []
    for m in outer.elements:
        if m.is_identity():
            continue
        moved = [f"{a}->{b}" for a, b in m.edge_items if a != b]
        leaves = [f"{a}->{b}" for a, b in m.vertex_items if a != b]
        desc = f"curves {', '.join(moved) or 'fixed'}; leaves {', '.join(leaves) or 'fixed'}"
        if m.reversal:
            desc += "; reverses orientation: inverts twists and PMod letters"
        parts.append(desc)
    return " | ".join(parts) if parts else "trivial outer group"


def picard_group(s: TssSurface, max_vertices: int = DEFAULT_MAX_VERTICES) -> PicardGroupDescription:
    ensure_valid(s)
    g = build_graph(s)
    outer = automorphism_group(g, max_vertices)
    return PicardGroupDescription(
        surface=s,
        graph=g,
        torus_factors={c.id: c.period for c in s.curves},
        leaf_factors={lf.id: mcg_structure(leaf_surface_type(s, lf.id)) for lf in s.leaves},
        outer=outer,
        action_note=_action_note(g, outer),
    )


def static_picard(s: TssSurface) -> GroupDescription:
    """Product over leaves of ``M(L fix zero curves)``."""
    ensure_valid(s)
    result = group()
    for lf in s.leaves:
        result = result * mcg_structure(leaf_surface_type(s, lf.id))
    return GroupDescription.product(result.atoms, "StatPic(P) = M(P fix Z)")


# ------------------------------------------------------------- elements

@dataclass(frozen=True)
class PicardElement:
    """An element of Pic; treat the dict fields as read-only."""

    outer: GraphMap
    angles: dict = field(default_factory=dict)
    twists: dict = field(default_factory=dict)
    words: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EqualityVerdict:
    kind: str  # "Equal" | "Distinct" | "Unknown"
    reason: str = ""

    def to_json(self):
        return {"Equal": True, "Distinct": False}.get(self.kind, "unknown")


EQUAL = EqualityVerdict("Equal")
UNKNOWN = EqualityVerdict("Unknown", "PMod words differ but their homology actions agree")


def _make(d: PicardGroupDescription, outer, angles, twists, words) -> PicardElement:
    return PicardElement(
        outer=outer,
        angles={c: Fraction(angles.get(c, 0)) % p for c, p in d.torus_factors.items()},
        twists={lf: tuple(twists.get(lf, (0,) * len(d.incident(lf)))) for lf in d.leaf_factors},
        words={lf: free_reduce(words.get(lf, FreeWord()).letters) for lf in d.leaf_factors},
    )


def check_element(d: PicardGroupDescription, a: PicardElement) -> None:
    if a.outer not in d.outer:
        raise DescriptionMismatch("outer part is not a labeled-graph automorphism of this surface")
    if set(a.angles) != set(d.torus_factors) or set(a.twists) != set(d.leaf_factors) \
            or set(a.words) != set(d.leaf_factors):
        raise DescriptionMismatch("element indexed by different curves/leaves than the description")
    for lf, v in a.twists.items():
        if len(v) != len(d.incident(lf)):
            raise DescriptionMismatch(f"twist vector on leaf {lf} has the wrong length")
    for c, t in a.angles.items():
        if not 0 <= t < d.torus_factors[c]:
            raise DescriptionMismatch(f"angle on curve {c} not reduced mod its period")


def identity_element(d: PicardGroupDescription) -> PicardElement:
    return _make(d, d.outer.identity(), {}, {}, {})


def from_modular_flow(d: PicardGroupDescription, curve: str, t) -> PicardElement:
    if curve not in d.torus_factors:
        raise KeyError(f"unknown curve {curve!r}")
    return _make(d, d.outer.identity(), {curve: Fraction(t)}, {}, {})


def from_boundary_twist(d: PicardGroupDescription, leaf: str, curve: str, k: int = 1) -> PicardElement:
    if leaf not in d.leaf_factors:
        raise KeyError(f"unknown leaf {leaf!r}")
    inc = d.incident(leaf)
    if curve not in inc:
        raise KeyError(f"curve {curve!r} does not bound leaf {leaf!r}")
    vec = tuple(int(k) if c == curve else 0 for c in inc)
    return _make(d, d.outer.identity(), {}, {leaf: vec}, {})


def from_graph_automorphism(d: PicardGroupDescription, m: GraphMap) -> PicardElement:
    if m not in d.outer:
        raise DescriptionMismatch("map is not in the labeled automorphism group")
    return _make(d, m, {}, {}, {})


def from_pmod_generator(d: PicardGroupDescription, leaf: str, index: int, exponent: int = 1) -> PicardElement:
    rank = d.pmod_rank(leaf)
    word = free_reduce([(index, 1 if exponent > 0 else -1)] * abs(exponent), rank)
    return _make(d, d.outer.identity(), {}, {}, {leaf: word})


def transport(d: PicardGroupDescription, m: GraphMap, a: PicardElement) -> PicardElement:
    """Act on the kernel data of ``a`` by the graph automorphism ``m``."""
    vm, em = m.vertex_map, m.edge_map
    sign = -1 if m.reversal else 1
    angles = {em[c]: t for c, t in a.angles.items()}
    twists, words = {}, {}
    for lf, vec in a.twists.items():
        target = vm[lf]
        slots = {c: i for i, c in enumerate(d.incident(target))}
        new = [0] * len(vec)
        for c, k in zip(d.incident(lf), vec):
            new[slots[em[c]]] = sign * k
        twists[target] = tuple(new)
    for lf, w in a.words.items():
        words[vm[lf]] = w.invert_letters() if m.reversal else w
    return PicardElement(a.outer, angles, twists, words)


def compose(d: PicardGroupDescription, a: PicardElement, b: PicardElement) -> PicardElement:
    """The product ``a * b``: data of ``b`` is moved by the outer part of ``a``, then added."""
    check_element(d, a)
    check_element(d, b)
    tb = transport(d, a.outer, b)
    return _make(
        d,
        a.outer.compose(b.outer),
        {c: a.angles[c] + tb.angles[c] for c in d.torus_factors},
        {lf: tuple(x + y for x, y in zip(a.twists[lf], tb.twists[lf])) for lf in d.leaf_factors},
        {lf: a.words[lf] * tb.words[lf] for lf in d.leaf_factors},
    )


def invert(d: PicardGroupDescription, a: PicardElement) -> PicardElement:
    check_element(d, a)
    m_inv = a.outer.inverse()
    negated = PicardElement(
        a.outer,
        {c: -t for c, t in a.angles.items()},
        {lf: tuple(-k for k in v) for lf, v in a.twists.items()},
        {lf: w.inverse() for lf, w in a.words.items()},
    )
    moved = transport(d, m_inv, negated)
    return _make(d, m_inv, moved.angles, moved.twists, moved.words)


def twist_class(d: PicardGroupDescription, leaf: str, vec) -> tuple:
    """Image of a boundary-twist vector in ``M(leaf)``.

    Boundary twists are trivial on discs and half-free annuli, and the two
    boundary twists of an annulus coincide.
    """
    factor = d.leaf_factors[leaf]
    if factor.is_trivial:
        return ()
    st = leaf_surface_type(d.surface, leaf)
    if (st.genus, st.fixed_boundary, st.free_boundary) == (0, 2, 0):
        return (sum(vec),)
    return tuple(vec)


def elements_equal(d: PicardGroupDescription, a: PicardElement, b: PicardElement) -> EqualityVerdict:
    check_element(d, a)
    check_element(d, b)
    if a.outer != b.outer:
        return EqualityVerdict("Distinct", "outer parts differ")
    for c in d.torus_factors:
        if a.angles[c] != b.angles[c]:
            return EqualityVerdict("Distinct", f"modular angles differ on curve {c}")
    for lf in d.leaf_factors:
        if twist_class(d, lf, a.twists[lf]) != twist_class(d, lf, b.twists[lf]):
            return EqualityVerdict("Distinct", f"boundary twists differ on leaf {lf}")
    differing = [lf for lf in d.leaf_factors if a.words[lf] != b.words[lf]]
    if not differing:
        return EQUAL
    for lf in differing:
        st = leaf_surface_type(d.surface, lf)
        ha = pmod_word_homology(a.words[lf], st.genus, st.fixed_boundary, st.free_boundary)
        hb = pmod_word_homology(b.words[lf], st.genus, st.fixed_boundary, st.free_boundary)
        if ha != hb:
            return EqualityVerdict("Distinct", f"homology actions differ on leaf {lf}")
    return UNKNOWN


def leaf_space_image(d: PicardGroupDescription, a: PicardElement) -> GraphMap:
    return a.outer


def is_static(d: PicardGroupDescription, a: PicardElement) -> bool:
    """True when ``a`` fixes every leaf, including the points of each zero curve."""
    return a.outer.is_identity() and not any(a.angles.values())


# -------------------------------------------------------------- JSON I/O

def element_to_json(d: PicardGroupDescription, a: PicardElement) -> dict:
    return {
        "outer": a.outer.to_json(),
        "angles": {c: format_rational(t) for c, t in a.angles.items()},
        "twists": {lf: dict(zip(d.incident(lf), v)) for lf, v in a.twists.items()},
        "words": {lf: w.to_json() for lf, w in a.words.items()},
    }


def element_from_json(d: PicardGroupDescription, obj: dict) -> PicardElement:
    """Missing entries default to zero / the empty word."""
    if not isinstance(obj, dict) or "outer" not in obj or set(obj) - {"outer", "angles", "twists", "words"}:
        raise ValueError("element must be an object with 'outer' and optional 'angles', 'twists', 'words'")
    outer = GraphMap.from_json(obj["outer"])
    angles = {}
    for c, t in obj.get("angles", {}).items():
        if c not in d.torus_factors:
            raise KeyError(f"unknown curve {c!r}")
        angles[c] = parse_rational(t)
    twists = {}
    for lf, entries in obj.get("twists", {}).items():
        if lf not in d.leaf_factors:
            raise KeyError(f"unknown leaf {lf!r}")
        inc = d.incident(lf)
        if set(entries) - set(inc):
            raise KeyError(f"twist on leaf {lf!r} names a curve that does not bound it")
        twists[lf] = tuple(int(entries.get(c, 0)) for c in inc)
    words = {}
    for lf, letters in obj.get("words", {}).items():
        if lf not in d.leaf_factors:
            raise KeyError(f"unknown leaf {lf!r}")
        words[lf] = FreeWord.from_json(letters, d.pmod_rank(lf))
    a = _make(d, outer, angles, twists, words)
    check_element(d, a)
    return a


def random_element(d: PicardGroupDescription, rng: random.Random, max_twist: int = 5,
                   max_denominator: int = 12, word_length: int = 0) -> PicardElement:
    """A random element; ``word_length=0`` keeps it in the decidable fragment."""
    outer = rng.choice(d.outer.elements)
    angles = {c: Fraction(rng.randrange(0, 4 * max_denominator), rng.randint(1, max_denominator)) * p
              for c, p in d.torus_factors.items()}
    twists = {lf: tuple(rng.randint(-max_twist, max_twist) for _ in d.incident(lf)) for lf in d.leaf_factors}
    words = {}
    for lf in d.leaf_factors:
        rank = d.pmod_rank(lf)
        if rank and word_length:
            words[lf] = free_reduce((rng.randrange(rank), rng.choice((1, -1))) for _ in range(word_length))
    return _make(d, outer, angles, twists, words)
