"""Combinatorial data model of a topologically stable Poisson structure.

A surface is described by its 2-dimensional symplectic leaves and the zero
curves separating them.  Everything numeric (periods, volumes) is an exact
:class:`fractions.Fraction` so that equality of labels is decidable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


class TssError(ValueError):
    """Raised for malformed or structurally invalid TSS documents."""


class TssParseError(TssError):
    pass


class TssValidationError(TssError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (optionally negative) into a Fraction.

    Only strings are accepted; floats would silently lose exactness.
    """
    if not isinstance(text, str):
        raise TssParseError(f"rational must be a string 'p/q', got {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise TssParseError(f"malformed rational {text!r}") from None
    if d <= 0:
        raise TssParseError(f"rational {text!r} needs a positive denominator")
    return Fraction(n, d)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ZeroCurve:
    id: str
    period: Fraction
    neg_leaf: str
    pos_leaf: str


@dataclass(frozen=True)
class Leaf:
    id: str
    genus: int
    sign: int
    volume: Fraction
    free_boundary: int = 0


@dataclass(frozen=True)
class TssSurface:
    closed: bool
    curves: tuple[ZeroCurve, ...]
    leaves: tuple[Leaf, ...]

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "leaves", tuple(self.leaves))

    def leaf(self, leaf_id: str) -> Leaf:
        for lf in self.leaves:
            if lf.id == leaf_id:
                return lf
        raise KeyError(leaf_id)

    def curve(self, curve_id: str) -> ZeroCurve:
        for c in self.curves:
            if c.id == curve_id:
                return c
        raise KeyError(curve_id)

    def incident_curves(self, leaf_id: str) -> tuple[str, ...]:
        """Ids of zero curves bounding the leaf, in document order."""
        return tuple(c.id for c in self.curves if leaf_id in (c.neg_leaf, c.pos_leaf))

    def boundary_count(self, leaf_id: str) -> int:
        return len(self.incident_curves(leaf_id)) + self.leaf(leaf_id).free_boundary

    def total_volume(self) -> Fraction:
        return sum((lf.volume for lf in self.leaves), Fraction(0))


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int
    sign: int
    ends: int = 0  # free boundary circles; always 0 on a closed surface


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    period: Fraction


@dataclass(frozen=True)
class LabeledGraph:
    """Directed multigraph: leaves as vertices, zero curves as edges (- to +)."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)


# ---------------------------------------------------------------- parsing

_TOP_KEYS = {"closed", "leaves", "curves"}
_LEAF_KEYS = {"id", "genus", "sign", "volume", "free_boundary"}
_CURVE_KEYS = {"id", "period", "neg", "pos"}


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise TssParseError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise TssParseError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise TssParseError(f"{where}: missing field(s) {sorted(missing)}")


def _nonneg_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise TssParseError(f"{where}: expected a nonnegative integer, got {value!r}")
    return value


def surface_from_dict(doc: Any) -> TssSurface:
    _check_keys(doc, _TOP_KEYS, _TOP_KEYS, "document")
    if not isinstance(doc["closed"], bool):
        raise TssParseError("document.closed: expected a boolean")
    if not isinstance(doc["leaves"], list) or not isinstance(doc["curves"], list):
        raise TssParseError("document: 'leaves' and 'curves' must be arrays")

    leaves = []
    for i, raw in enumerate(doc["leaves"]):
        where = f"leaves[{i}]"
        _check_keys(raw, _LEAF_KEYS, _LEAF_KEYS - {"free_boundary"}, where)
        if not isinstance(raw["id"], str):
            raise TssParseError(f"{where}.id: expected a string")
        if raw["sign"] not in ("+", "-"):
            raise TssParseError(f"{where}.sign: expected '+' or '-'")
        leaves.append(Leaf(
            id=raw["id"],
            genus=_nonneg_int(raw["genus"], f"{where}.genus"),
            sign=1 if raw["sign"] == "+" else -1,
            volume=parse_rational(raw["volume"]),
            free_boundary=_nonneg_int(raw.get("free_boundary", 0), f"{where}.free_boundary"),
        ))
    leaf_ids = [lf.id for lf in leaves]
    if len(set(leaf_ids)) != len(leaf_ids):
        raise TssParseError("leaves: duplicate leaf id")

    curves = []
    for i, raw in enumerate(doc["curves"]):
        where = f"curves[{i}]"
        _check_keys(raw, _CURVE_KEYS, _CURVE_KEYS, where)
        for key in ("id", "neg", "pos"):
            if not isinstance(raw[key], str):
                raise TssParseError(f"{where}.{key}: expected a string")
        period = parse_rational(raw["period"])
        if period <= 0:
            raise TssParseError(f"{where}.period: must be positive, got {raw['period']}")
        for key in ("neg", "pos"):
            if raw[key] not in leaf_ids:
                raise TssParseError(f"{where}.{key}: dangling reference to leaf {raw[key]!r}")
        curves.append(ZeroCurve(raw["id"], period, raw["neg"], raw["pos"]))
    curve_ids = [c.id for c in curves]
    if len(set(curve_ids)) != len(curve_ids):
        raise TssParseError("curves: duplicate curve id")

    return TssSurface(closed=doc["closed"], curves=tuple(curves), leaves=tuple(leaves))


def parse_tss(text: str) -> TssSurface:
    """Parse a JSON TSS document.  Never raises anything but TssParseError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TssParseError(f"JSON syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except (TypeError, UnicodeDecodeError) as exc:
        raise TssParseError(str(exc)) from None
    return surface_from_dict(doc)


def surface_to_dict(s: TssSurface) -> dict:
    return {
        "closed": s.closed,
        "leaves": [
            {"id": lf.id, "genus": lf.genus, "sign": "+" if lf.sign > 0 else "-",
             "volume": format_rational(lf.volume), "free_boundary": lf.free_boundary}
            for lf in s.leaves
        ],
        "curves": [
            {"id": c.id, "period": format_rational(c.period), "neg": c.neg_leaf, "pos": c.pos_leaf}
            for c in s.curves
        ],
    }


def serialize_tss(s: TssSurface) -> str:
    return json.dumps(surface_to_dict(s), indent=2)


def load_tss(path) -> TssSurface:
    with open(path, encoding="utf-8") as fh:
        return parse_tss(fh.read())


# ------------------------------------------------------------- validation

def _connected(s: TssSurface) -> bool:
    if not s.leaves:
        return False
    adj = {lf.id: set() for lf in s.leaves}
    for c in s.curves:
        if c.neg_leaf in adj and c.pos_leaf in adj:
            adj[c.neg_leaf].add(c.pos_leaf)
            adj[c.pos_leaf].add(c.neg_leaf)
    seen, stack = set(), [s.leaves[0].id]
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(adj[v] - seen)
    return len(seen) == len(adj)


def validate(s: TssSurface) -> list[str]:
    """List every violated structural invariant; an empty list means valid."""
    problems = []
    leaf_ids = {lf.id for lf in s.leaves}
    if len(leaf_ids) != len(s.leaves):
        problems.append("duplicate leaf id")
    if len({c.id for c in s.curves}) != len(s.curves):
        problems.append("duplicate curve id")
    if not s.curves:
        problems.append("at least one zero curve is required")

    dangling = False
    for c in s.curves:
        if c.period <= 0:
            problems.append(f"curve {c.id}: period must be positive")
        for end in (c.neg_leaf, c.pos_leaf):
            if end not in leaf_ids:
                problems.append(f"curve {c.id}: dangling reference to leaf {end}")
                dangling = True
        if c.neg_leaf == c.pos_leaf:
            problems.append(f"curve {c.id}: bounds leaf {c.neg_leaf} on both sides")
    if dangling:
        return problems

    signs = {lf.id: lf.sign for lf in s.leaves}
    for c in s.curves:
        if signs[c.pos_leaf] != 1:
            problems.append(f"curve {c.id}: pos leaf {c.pos_leaf} has sign -1")
        if signs[c.neg_leaf] != -1:
            problems.append(f"curve {c.id}: neg leaf {c.neg_leaf} has sign +1")

    for lf in s.leaves:
        if lf.sign not in (1, -1):
            problems.append(f"leaf {lf.id}: sign must be +1 or -1")
        if lf.genus < 0 or lf.free_boundary < 0:
            problems.append(f"leaf {lf.id}: negative genus or boundary count")
        if lf.volume == 0:
            problems.append(f"leaf {lf.id}: volume must be nonzero")
        elif (lf.volume > 0) != (lf.sign > 0):
            problems.append(f"leaf {lf.id}: volume sign disagrees with leaf sign")
        if s.closed and lf.free_boundary:
            problems.append(f"leaf {lf.id}: free boundary on a closed surface")
        if not s.incident_curves(lf.id) and lf.free_boundary == 0:
            problems.append(f"leaf {lf.id}: not bounded by any curve or free boundary")

    # chi(P) = sum of chi(leaf); chi(P) + (free circles) = 2 - 2 genus(P) is even
    free = sum(lf.free_boundary for lf in s.leaves)
    if (euler_characteristic(s) + free) % 2:
        problems.append("Euler count inconsistent: chi + free boundary circles is odd")
    if not _connected(s):
        problems.append("leaf/curve incidence graph is disconnected")
    return problems


def ensure_valid(s: TssSurface) -> TssSurface:
    problems = validate(s)
    if problems:
        raise TssValidationError(problems)
    return s


def euler_characteristic(s: TssSurface) -> int:
    return sum(2 - 2 * lf.genus - s.boundary_count(lf.id) for lf in s.leaves)


def build_graph(s: TssSurface) -> LabeledGraph:
    ensure_valid(s)
    return LabeledGraph(
        vertices=tuple(Vertex(lf.id, lf.genus, lf.sign, lf.free_boundary) for lf in s.leaves),
        edges=tuple(Edge(c.id, c.neg_leaf, c.pos_leaf, c.period) for c in s.curves),
    )
