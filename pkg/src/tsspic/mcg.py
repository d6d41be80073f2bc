"""Surface-group combinatorics.

Free-group words for pi_1 of a bordered surface, the boundary commutation
property, a small catalog of mapping class groups ``M(S fix boundary)``,
and the integral homology action of Dehn twist words.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .model import format_rational


class UncatalogedSurfaceError(ValueError):
    """The requested mapping class group is not in the catalog."""


# ------------------------------------------------------------ free groups

@dataclass(frozen=True)
class FreeWord:
    letters: tuple[tuple[int, int], ...] = ()

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return free_reduce(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def invert_letters(self) -> "FreeWord":
        """Image under the automorphism sending every generator to its inverse."""
        return FreeWord(tuple((g, -e) for g, e in self.letters))

    def to_json(self) -> list:
        return [[g, e] for g, e in self.letters]

    @classmethod
    def from_json(cls, obj, rank: int | None = None) -> "FreeWord":
        return free_reduce([tuple(x) for x in obj], rank)


def free_reduce(letters: Iterable, rank: int | None = None) -> FreeWord:
    """Freely reduce a list of ``(generator, +-1)`` letters."""
    out: list[tuple[int, int]] = []
    for letter in letters:
        g, e = letter
        if isinstance(g, bool) or not isinstance(g, int) or g < 0 or e not in (1, -1):
            raise ValueError(f"bad letter {letter!r}")
        if rank is not None and g >= rank:
            raise ValueError(f"generator index {g} out of range for rank {rank}")
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return FreeWord(tuple(out))


def commutes_with_generator(w: FreeWord, i: int) -> bool:
    gi = FreeWord(((i, 1),))
    return len(w * gi * w.inverse() * gi.inverse()) == 0


def is_power_of_generator(w: FreeWord, i: int) -> int | None:
    if not w.letters:
        return 0
    e = w.letters[0][1]
    if all(letter == (i, e) for letter in w.letters):
        return e * len(w)
    return None


# ---------------------------------------------------------- descriptions

_ORDER = {"Torus": 0, "Z": 1, "FreeAbelian": 1, "FiniteCyclic": 2, "SymbolicPMod": 3, "Trivial": 4}


@dataclass(frozen=True)
class Atom:
    kind: str
    rank: int = 0
    period: Fraction | None = None
    genus: int = 0
    punctures: int = 0

    def pretty(self) -> str:
        if self.kind == "Trivial":
            return "1"
        if self.kind == "Z":
            return "Z"
        if self.kind == "FreeAbelian":
            return f"Z^{self.rank}"
        if self.kind == "Torus":
            return f"T_{{{format_rational(self.period)}}}"
        if self.kind == "FiniteCyclic":
            return f"Z{self.rank}"
        return f"PMod({self.genus},{self.punctures})"

    def to_json(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind in ("FreeAbelian", "FiniteCyclic"):
            d["n"] = self.rank
        elif self.kind == "Torus":
            d["period"] = format_rational(self.period)
        elif self.kind == "SymbolicPMod":
            d["genus"], d["punctures"] = self.genus, self.punctures
        return d

    def _sort_key(self):
        return (_ORDER[self.kind], self.period or 0, self.rank, self.genus, self.punctures)


TRIVIAL = Atom("Trivial")
Z = Atom("Z")


def free_abelian(n: int) -> Atom:
    return TRIVIAL if n == 0 else Z if n == 1 else Atom("FreeAbelian", rank=n)


def torus(period) -> Atom:
    return Atom("Torus", period=Fraction(period))


def finite_cyclic(n: int) -> Atom:
    return TRIVIAL if n == 1 else Atom("FiniteCyclic", rank=n)


def symbolic_pmod(genus: int, punctures: int) -> Atom:
    # PMod of a sphere with at most 3 punctures is trivial
    if genus == 0 and punctures <= 3:
        return TRIVIAL
    return Atom("SymbolicPMod", genus=genus, punctures=punctures)


@dataclass(frozen=True)
class GroupDescription:
    """Direct product of atoms in canonical order.

    All ``Z`` and ``Z^n`` factors are merged into a single free abelian atom
    and trivial factors are dropped, so equal groups (within the catalog)
    have equal descriptions.
    """

    atoms: tuple[Atom, ...]
    presentation_note: str = ""

    @classmethod
    def product(cls, atoms: Iterable[Atom], note: str = "") -> "GroupDescription":
        rank = 0
        rest = []
        for a in atoms:
            if a.kind == "Z":
                rank += 1
            elif a.kind == "FreeAbelian":
                rank += a.rank
            elif a.kind != "Trivial":
                rest.append(a)
        if rank:
            rest.append(free_abelian(rank))
        rest.sort(key=Atom._sort_key)
        return cls(tuple(rest) or (TRIVIAL,), note)

    def __mul__(self, other: "GroupDescription") -> "GroupDescription":
        note = "; ".join(n for n in (self.presentation_note, other.presentation_note) if n)
        return GroupDescription.product(self.atoms + other.atoms, note)

    @property
    def is_trivial(self) -> bool:
        return self.atoms == (TRIVIAL,)

    @property
    def free_rank(self) -> int:
        return sum(1 if a.kind == "Z" else a.rank for a in self.atoms if a.kind in ("Z", "FreeAbelian"))

    def pretty(self) -> str:
        return " (+) ".join(a.pretty() for a in self.atoms)

    def to_json(self) -> dict:
        d = {"atoms": [a.to_json() for a in self.atoms], "pretty": self.pretty()}
        if self.presentation_note:
            d["note"] = self.presentation_note
        return d


def group(*atoms: Atom, note: str = "") -> GroupDescription:
    return GroupDescription.product(atoms, note)


# ---------------------------------------------------- mapping class groups

@dataclass(frozen=True)
class SurfaceType:
    genus: int
    fixed_boundary: int = 0
    free_boundary: int = 0

    def __post_init__(self):
        if min(self.genus, self.fixed_boundary, self.free_boundary) < 0:
            raise ValueError("surface type entries must be nonnegative")

    @property
    def boundary(self) -> int:
        return self.fixed_boundary + self.free_boundary

    @property
    def rank(self) -> int:
        """Rank of the free fundamental group (bordered surfaces only)."""
        return 2 * self.genus + self.boundary - 1


def mcg_structure(s: SurfaceType) -> GroupDescription:
    """``M(S)``: isotopy classes of diffeomorphisms fixing the fixed circles.

    Raises :class:`UncatalogedSurfaceError` rather than guessing outside the
    catalog.
    """
    g, k, free = s.genus, s.fixed_boundary, s.free_boundary
    if g == 0 and (k, free) in ((1, 0), (0, 1), (1, 1)):
        return group(TRIVIAL, note="disc or half-fixed annulus: every class is isotopic to the identity")
    if g == 0 and (k, free) == (2, 0):
        # both boundary twists of an annulus are the same class
        return group(Z, note="annulus: generated by the Dehn twist")
    if free == 0 and k >= 1 and (g >= 1 or k >= 3):
        return group(free_abelian(k), symbolic_pmod(g, k),
                     note=f"boundary twists Z^{k} (+) PMod({g},{k})")
    raise UncatalogedSurfaceError(f"no cataloged mapping class group for (genus={g}, fixed={k}, free={free})")


def pmod_generators(genus: int, punctures: int) -> list[tuple[str, tuple[int, ...]]]:
    """Named Dehn twist generators of PMod with their H_1 classes.

    Classes are in the basis ``a_1, b_1, ..., a_g, b_g, d_1, ..., d_{k-1}``.
    The family is a fixed naming scheme for word arithmetic; no presentation
    is claimed.
    """
    if symbolic_pmod(genus, punctures) == TRIVIAL:
        return []
    n = 2 * genus + punctures - 1

    def unit(*idx, coeffs=None):
        v = [0] * n
        for i, c in zip(idx, coeffs or [1] * len(idx)):
            v[i] += c
        return tuple(v)

    gens = []
    for i in range(genus):
        gens.append((f"a{i + 1}", unit(2 * i)))
        gens.append((f"b{i + 1}", unit(2 * i + 1)))
    for i in range(genus - 1):
        gens.append((f"c{i + 1}", unit(2 * i, 2 * i + 2, coeffs=[1, -1])))
    base = 2 * genus
    if genus >= 1:
        for j in range(punctures - 1):
            gens.append((f"e{j + 1}", unit(2 * genus - 2, base + j)))
    else:
        for i in range(punctures - 1):
            for j in range(i + 1, punctures - 1):
                gens.append((f"s{i + 1}{j + 1}", unit(base + i, base + j)))
    return gens


# ------------------------------------------------------------- homology

def intersection_form(s: SurfaceType) -> list[list[int]]:
    """<a_i, b_i> = +1, <b_i, a_i> = -1, boundary classes pair to zero."""
    n = max(s.rank, 0) if s.boundary else 2 * s.genus
    J = [[0] * n for _ in range(n)]
    for i in range(s.genus):
        J[2 * i][2 * i + 1] = 1
        J[2 * i + 1][2 * i] = -1
    return J


def pair(x: Sequence[int], y: Sequence[int], J) -> int:
    return sum(x[i] * J[i][j] * y[j] for i in range(len(x)) for j in range(len(y)) if J[i][j])


def twist_transvection(curve: Sequence[int], x: Sequence[int], J, power: int = 1) -> tuple[int, ...]:
    """``x + power * <x, c> c``."""
    if not (len(curve) == len(x) == len(J)):
        raise ValueError("dimension mismatch between class, vector and pairing")
    k = power * pair(x, curve, J)
    return tuple(xi + k * ci for xi, ci in zip(x, curve))


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def transvection_matrix(curve: Sequence[int], J, power: int = 1) -> list[list[int]]:
    n = len(J)
    cols = [twist_transvection(curve, [int(i == j) for i in range(n)], J, power) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def homology_action(word: Iterable[tuple[Sequence[int], int]], s: SurfaceType) -> list[list[int]]:
    """Matrix of a twist word on H_1.

    ``word`` lists ``(class, exponent)`` letters; the result is the ordered
    product ``M_1 M_2 ... M_n`` (the last letter acts first).
    """
    J = intersection_form(s)
    n = len(J)
    H = [[int(i == j) for j in range(n)] for i in range(n)]
    for curve, e in word:
        if len(curve) != n:
            raise ValueError(f"class of length {len(curve)} on a rank-{n} homology")
        H = _matmul(H, transvection_matrix(curve, J, e))
    return H


def pmod_word_homology(w: FreeWord, genus: int, punctures: int, free_boundary: int = 0) -> list[list[int]]:
    gens = pmod_generators(genus, punctures)
    s = SurfaceType(genus, punctures, free_boundary)
    return homology_action(((gens[g][1], e) for g, e in w.letters), s)


def int_det(M) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    A = [list(row) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def preserves_form(H, J) -> bool:
    n = len(J)
    HT = [[H[j][i] for j in range(n)] for i in range(n)]
    return _matmul(_matmul(HT, J), H) == [list(r) for r in J] if n else True


# ---------------------------------------------------- symplectic surfaces

def symplectic_surface_picard_report(s: SurfaceType) -> dict:
    """Picard group of a connected symplectic surface, ``Pic(S) = Out(pi_1(S))``.

    Boundary circles (fixed or free) are read as ends of the open surface.
    """
    g, b = s.genus, s.boundary
    if (g, b) == (0, 0):
        return {"surface": "sphere", "pic": group(TRIVIAL).to_json(),
                "relations": ["Pic(S) = Out(pi1(S)) = {e}",
                              "Mod(S) = Z2, generated by an orientation-reversing diffeomorphism"]}
    if (g, b) == (0, 1):
        return {"surface": "disc", "pic": group(TRIVIAL).to_json(),
                "relations": ["Pic(S) = Out(pi1(S)) = {e} = PMod(S)", "Mod(S) = Z2"]}
    if (g, b) == (0, 2):
        return {"surface": "cylinder", "pic": group(finite_cyclic(2)).to_json(),
                "relations": ["j(Poiss(S)) = PMod(S) = {e} < Out(pi1(S)) = Z2 = Pic(S)",
                              "Mod(S) = Z2 x Z2"]}
    if b == 0:
        return {"surface": f"closed genus {g}",
                "pic": {"symbolic": "Mod(S)", "pretty": "Pic(S) = Mod(S)"},
                "relations": ["Pic(S) = Out(pi1(S)) = Mod(S)",
                              "j(Poiss(S)) = Out+(pi1(S)) < Out(pi1(S))"]}
    return {"surface": f"genus {g} with {b} ends",
            "pic": {"symbolic": f"Out(F_{s.rank})", "pretty": f"Pic(S) = Out(F_{s.rank})"},
            "relations": ["j(Poiss(S)) = Pic(S, dS) = PMod(S) < Mod(S) < Out(pi1(S)) = Pic(S)",
                          f"M(S fix dS) = PMod(S) (+) Z^{b}"]}
