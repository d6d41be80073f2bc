"""Builders for the standard TSS examples.

Leaf signs alternate along each chain of zero curves; curve ``Z<i>`` always
points from its negative leaf to its positive one.  Volumes are arbitrary
nonzero values of the right sign unless given.  The shipped documents
measure periods in units of ``2 pi``: ``(r^2 - 1) d_r ^ d_theta`` has period
``pi`` on both of its zero curves, recorded as ``1/2``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .model import Leaf, TssSurface, ZeroCurve, ensure_valid, parse_tss


def _sign(i: int) -> int:
    return -1 if i % 2 == 0 else 1


def _chain_curve(i: int, a: Leaf, b: Leaf, period) -> ZeroCurve:
    neg, pos = (a, b) if a.sign < 0 else (b, a)
    return ZeroCurve(f"Z{i + 1}", Fraction(period), neg.id, pos.id)


def _periods(periods, n):
    if periods is None:
        return [Fraction(1)] * n
    periods = [Fraction(p) for p in periods]
    if len(periods) != n:
        raise ValueError(f"expected {n} periods, got {len(periods)}")
    return periods


def sphere_equator(period=1) -> TssSurface:
    leaves = (Leaf("S", 0, -1, Fraction(-1)), Leaf("N", 0, 1, Fraction(1)))
    return ensure_valid(TssSurface(True, (ZeroCurve("Z1", Fraction(period), "S", "N"),), leaves))


def cylinder(n_curves: int, periods=None, volumes=None, first_sign: int = -1) -> TssSurface:
    """Open cylinder cut by ``n_curves`` parallel circles into leaves ``L0 .. Ln``.

    The two end leaves are half-open annuli (one free boundary circle each);
    the ``n_curves - 1`` inner leaves are annuli.  ``first_sign`` is the sign
    of ``L0``.
    """
    if n_curves < 1:
        raise ValueError("need at least one zero curve")
    if first_sign not in (1, -1):
        raise ValueError("first_sign must be +1 or -1")
    periods = _periods(periods, n_curves)
    leaves = []
    for i in range(n_curves + 1):
        end = i in (0, n_curves)
        sign = first_sign * _sign(i + 1)
        vol = Fraction(volumes[i]) if volumes is not None else Fraction(sign * (i + 1))
        leaves.append(Leaf(f"L{i}", 0, sign, vol, 1 if end else 0))
    curves = [_chain_curve(i, leaves[i], leaves[i + 1], periods[i]) for i in range(n_curves)]
    return ensure_valid(TssSurface(False, tuple(curves), tuple(leaves)))


def torus_parallel(n_curves: int, periods=None) -> TssSurface:
    """Torus cut by ``n_curves`` (even) parallel non-separating circles into annuli."""
    if n_curves < 2 or n_curves % 2:
        raise ValueError("a torus needs an even, positive number of parallel zero curves")
    periods = _periods(periods, n_curves)
    leaves = [Leaf(f"A{i}", 0, _sign(i), Fraction(_sign(i))) for i in range(n_curves)]
    curves = [_chain_curve(i, leaves[i], leaves[(i + 1) % n_curves], periods[i]) for i in range(n_curves)]
    return ensure_valid(TssSurface(True, tuple(curves), tuple(leaves)))


def genus2_separating(period=1) -> TssSurface:
    leaves = (Leaf("H1", 1, -1, Fraction(-2)), Leaf("H2", 1, 1, Fraction(2)))
    return ensure_valid(TssSurface(True, (ZeroCurve("Z1", Fraction(period), "H1", "H2"),), leaves))


BUILTIN = {
    "sphere-equator": sphere_equator,
    "cyl1": lambda: cylinder(1),
    # (r^2 - 1) d_r ^ d_theta: negative between its zero curves
    "cyl2": lambda: cylinder(2, periods=["1/2", "1/2"], first_sign=1),
    "torus-2-parallel": lambda: torus_parallel(2),
    "torus-2k-parallel": lambda: torus_parallel(6),
    "genus2-separating": genus2_separating,
}


def shipped_example(name: str) -> TssSurface:
    """Load one of the JSON documents bundled in ``tsspic/data``."""
    stem = name[:-5] if name.endswith(".json") else name
    text = resources.files("tsspic").joinpath("data", f"{stem}.json").read_text(encoding="utf-8")
    return parse_tss(text)


def shipped_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("tsspic").joinpath("data").iterdir()
                  if p.name.endswith(".json"))


def to_document(s: TssSurface) -> str:
    from .model import surface_to_dict

    return json.dumps(surface_to_dict(s), indent=2) + "\n"
