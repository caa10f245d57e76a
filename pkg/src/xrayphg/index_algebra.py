"""Index sets and their transformation rules under the X-ray transform.

An index set is a set of pairs (z, k) of a complex exponent and a log power,
closed under lowering k and (for the sets used here) under z -> z + step.
Sets are represented lazily: each set knows how to list its points with
Re z <= s for any real s, and every operation composes these enumerators, so
all operations are exact below whatever cutoff a caller inspects.

Exponents are ``fractions.Fraction`` whenever they are real and rational
(floats within 1e-9 of a fraction with denominator <= 1024 are snapped),
otherwise complex floats rounded to 1e-9 for comparison.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import IntegrabilityError

Exponent = Union[Fraction, complex]

EXPONENT_TOL = 1e-9
_MAX_DENOMINATOR = 1024


def canon(z) -> Exponent:
    """Canonical exponent: a Fraction when real rational, else a rounded complex."""
    if isinstance(z, Fraction):
        return z
    if isinstance(z, int):
        return Fraction(z)
    zc = complex(z)
    if abs(zc.imag) < EXPONENT_TOL:
        frac = Fraction(zc.real).limit_denominator(_MAX_DENOMINATOR)
        if abs(float(frac) - zc.real) < EXPONENT_TOL:
            return frac
    return complex(round(zc.real, 9), round(zc.imag, 9))


def re(z: Exponent) -> float:
    return float(z) if isinstance(z, Fraction) else z.real


def im(z: Exponent) -> float:
    return 0.0 if isinstance(z, Fraction) else z.imag


def _add(a: Exponent, b: Exponent) -> Exponent:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return canon(complex(a) + complex(b))


def _mul(a: Exponent, b: Exponent) -> Exponent:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return canon(complex(a) * complex(b))


@dataclass(frozen=True, order=False)
class IndexPoint:
    z: Exponent
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("log power must be nonnegative")
        object.__setattr__(self, "z", canon(self.z))

    def sort_key(self):
        return (re(self.z), im(self.z), self.k)

    def __lt__(self, other: "IndexPoint") -> bool:
        return self.sort_key() < other.sort_key()

    def as_tuple(self) -> tuple[float, float, int]:
        return (re(self.z), im(self.z), self.k)


LogMap = dict  # exponent -> maximal log power


def _merge_max(into: LogMap, z: Exponent, k: int) -> None:
    if into.get(z, -1) < k:
        into[z] = k


class IndexSet:
    """Lazy index set.

    Parameters
    ----------
    enumerator : callable
        Maps a real cutoff s to a dict {exponent: maximal log power} over all
        exponents with Re z <= s.
    step : Fraction
        A shift under which the set is known to be closed (1 for C∞ sets,
        2 for C∞_α sets); ``None`` when no closure is claimed.
    label : str
        Free-text description.
    """

    def __init__(self, enumerator: Callable[[float], LogMap], step, label: str = ""):
        self._enumerator = enumerator
        self.step = None if step is None else Fraction(step)
        self.label = label

    def __repr__(self) -> str:
        return f"IndexSet({self.label!r})"

    def max_logs(self, s: float) -> LogMap:
        return dict(self._enumerator(float(s)))

    def enumerate_below(self, s: float) -> list[IndexPoint]:
        pts = [IndexPoint(z, j) for z, k in self.max_logs(s).items() for j in range(k + 1)]
        return sorted(pts, key=IndexPoint.sort_key)

    def contains(self, z, k: int = 0) -> bool:
        z = canon(z)
        return self.max_logs(re(z)).get(z, -1) >= k

    def infimum(self, search: float = 64.0) -> float:
        """Smallest real part present (inf for the empty set within the search range)."""
        logs = self.max_logs(search)
        return min((re(z) for z in logs), default=math.inf)

    def equal_below(self, other: "IndexSet", s: float) -> bool:
        return self.max_logs(s) == other.max_logs(s)

    def with_label(self, label: str) -> "IndexSet":
        return IndexSet(self._enumerator, self.step, label)

    def json_step(self) -> int:
        """Smallest integer shift under which the set is closed (1 if unknown)."""
        return 1 if self.step is None else self.step.numerator

    def generators(self, cutoff: float = 20.0) -> list[tuple[Exponent, int, int]]:
        """Minimal generators (z, k, step) reproducing the set below ``cutoff``."""
        step = self.json_step()
        logs = self.max_logs(cutoff)
        out = []
        for z, k in logs.items():
            below = logs.get(_add(z, Fraction(-step)), -1) if self.step is not None else -1
            if below < k:
                out.append((z, k, step))
        out.sort(key=lambda g: (re(g[0]), im(g[0]), g[1]))
        return out

    def to_json(self, cutoff: float = 20.0) -> str:
        gens = [
            {"z": [re(z), im(z)], "k": k, "step": st} for z, k, st in self.generators(cutoff)
        ]
        label = self.label
        note = f"generators listed below {cutoff:g}"
        label = f"{label}; {note}" if label else note
        return json.dumps({"generators": gens, "label": label}, sort_keys=True)


@dataclass(frozen=True)
class Generator:
    """Arithmetic progression z + p*step with maximal log power logs[min(p, -1)]."""

    z: Exponent
    step: int = 1
    logs: tuple[int, ...] = (0,)

    def __post_init__(self):
        object.__setattr__(self, "z", canon(self.z))
        if self.step not in (1, 2):
            raise ValueError("generator step must be 1 or 2")
        if not self.logs or min(self.logs) < 0:
            raise ValueError("log schedule must be nonempty and nonnegative")
        object.__setattr__(self, "logs", tuple(int(k) for k in self.logs))

    def enumerate(self, s: float, into: LogMap) -> None:
        base = re(self.z)
        if base > s:
            return
        pmax = int(math.floor((s - base) / self.step + 1e-12))
        for p in range(pmax + 1):
            k = self.logs[min(p, len(self.logs) - 1)]
            _merge_max(into, _add(self.z, Fraction(p * self.step)), k)


def from_generators(generators: Iterable[Generator], label: str = "") -> IndexSet:
    gens = tuple(generators)

    def enum(s: float) -> LogMap:
        out: LogMap = {}
        for g in gens:
            g.enumerate(s, out)
        return out

    step = math.lcm(*(g.step for g in gens)) if gens else 1
    return IndexSet(enum, step, label)


def natural(k: int = 0, label: str | None = None) -> IndexSet:
    """N_0 x {0..k}."""
    return from_generators([Generator(0, 1, (k,))], label or ("N0" if k == 0 else f"N0x{{0..{k}}}"))


def empty() -> IndexSet:
    return IndexSet(lambda s: {}, 1, "empty")


def progression(z, k: int = 0, step: int = 1, label: str = "") -> IndexSet:
    """{(z + p*step, j): p >= 0, j <= k}."""
    return from_generators([Generator(z, step, (k,))], label or f"({z}+{step}N0, <={k})")


def from_json(text: str) -> IndexSet:
    data = json.loads(text) if isinstance(text, str) else text
    gens = []
    for g in data.get("generators", []):
        re_z, im_z = g["z"]
        gens.append(Generator(canon(complex(re_z, im_z)), int(g.get("step", 1)), (int(g.get("k", 0)),)))
    return from_generators(gens, data.get("label", ""))


def _step_lcm(*steps) -> Fraction | None:
    if any(s is None for s in steps):
        return None
    num = math.lcm(*(s.numerator for s in steps))
    den = math.gcd(*(s.denominator for s in steps))
    return Fraction(num, den)


def union(e1: IndexSet, e2: IndexSet) -> IndexSet:
    def enum(s: float) -> LogMap:
        out = e1.max_logs(s)
        for z, k in e2.max_logs(s).items():
            _merge_max(out, z, k)
        return out

    return IndexSet(enum, _step_lcm(e1.step, e2.step), f"({e1.label}) ∪ ({e2.label})")


def union_all(sets: Sequence[IndexSet]) -> IndexSet:
    if not sets:
        return empty()
    out = sets[0]
    for e in sets[1:]:
        out = union(out, e)
    return out


def extended_union(e1: IndexSet, e2: IndexSet) -> IndexSet:
    """E1 ∪ E2 ∪ {(z, k + k' + 1): (z, k) ∈ E1, (z, k') ∈ E2}."""

    def enum(s: float) -> LogMap:
        a, b = e1.max_logs(s), e2.max_logs(s)
        out = dict(a)
        for z, k in b.items():
            if z in a:
                out[z] = max(a[z], k, a[z] + k + 1)
            else:
                out[z] = k
        return out

    return IndexSet(enum, _step_lcm(e1.step, e2.step), f"({e1.label}) ∪̄ ({e2.label})")


def _affine(e: IndexSet, mul: Fraction, add: Exponent, closure: int, label: str) -> IndexSet:
    """{(mul*z + add + closure*l, k)}; closure 0 means no added shifts."""
    mul = Fraction(mul)
    if mul <= 0:
        raise ValueError("affine multiplier must be positive")
    add = canon(add)

    def enum(s: float) -> LogMap:
        base = e.max_logs((s - re(add)) / float(mul))
        out: LogMap = {}
        for z, k in base.items():
            w = _add(_mul(mul, z), add)
            if re(w) > s + 1e-12:
                continue
            _merge_max(out, w, k)
            if closure:
                for ell in range(1, int(math.floor((s - re(w)) / closure + 1e-12)) + 1):
                    _merge_max(out, _add(w, Fraction(ell * closure)), k)
        return out

    if closure:
        step = Fraction(closure)
    else:
        step = None if e.step is None else mul * e.step
    return IndexSet(enum, step, label)


def shift(e: IndexSet, c) -> IndexSet:
    """{(z + c, k)}: the index set of ρ^c times a function with index set E."""
    c = canon(c)
    return _affine(e, Fraction(1), c, 0, f"{c}+({e.label})")


def scale(e: IndexSet, factor: int) -> IndexSet:
    """{(z / e, k)} for e in {1, 2}."""
    if factor not in (1, 2):
        raise ValueError("scale factor must be 1 or 2")
    if factor == 1:
        return e
    return _affine(e, Fraction(1, factor), Fraction(0), 0, f"({e.label})/{factor}")


def pullback_index(e: IndexSet, factor: int, strict: bool = False) -> IndexSet:
    """Index set of a pullback along a face with vanishing order ``factor``.

    factor 0 gives N_0 x {0}; otherwise {(factor*z + l, k)} with l >= 0, or
    with ``strict`` only even l.
    """
    if factor < 0:
        raise ValueError("vanishing order must be nonnegative")
    if factor == 0:
        return natural()
    closure = 2 if strict else 1
    return _affine(e, Fraction(factor), Fraction(0), closure, f"pullback[{factor}{',strict' if strict else ''}]({e.label})")


# ---------------------------------------------------------------------------
# b-fibration data and the pushforward rule

G0, G1, G2 = "G0", "G1", "G2"
BOUNDARY, GLANCING = "∂M", "∂₀SM"
FACES = (G0, G1, G2, BOUNDARY, GLANCING)


@dataclass(frozen=True)
class IndexFamily:
    """One index set per boundary face."""

    sets: Mapping[str, IndexSet]

    def __post_init__(self):
        for face in self.sets:
            if face not in FACES:
                raise ValueError(f"unknown face {face!r}")

    def __getitem__(self, face: str) -> IndexSet:
        return self.sets[face]


@dataclass(frozen=True)
class GeometricData:
    """Vanishing orders of a b-fibration's target boundary-defining function.

    ``exponents[face]`` is the order to which the pulled-back target bdf
    vanishes at a source face; ``corners`` lists pairs of source faces that
    meet.
    """

    target: str
    exponents: Mapping[str, int]
    corners: tuple[tuple[str, str], ...] = ()


# Projection to the base and to the inward boundary of the blown-up space
# D = ∂₊SM x [0,1] with faces G0 = {u=0}, G1 = {u=1}, G2 = ∂₀SM x [0,1].
PI_HAT = GeometricData(BOUNDARY, {G0: 1, G1: 1, G2: 2}, ((G0, G2), (G1, G2)))
F_HAT = GeometricData(GLANCING, {G0: 0, G1: 0, G2: 1}, ((G0, G2), (G1, G2)))


def pushforward_index(fam: IndexFamily, gd: GeometricData, target_face: str | None = None) -> IndexSet:
    """Index set of the pushforward of a b-density with index family ``fam``.

    Faces that map into the target with positive order contribute
    scale(E_face, e_face); faces meeting at a corner are combined by extended
    union.  Faces with order 0 map into the interior and must carry
    exponents with positive real part.
    """
    if target_face is not None and target_face != gd.target:
        raise ValueError(f"geometric data describes {gd.target}, not {target_face}")
    missing = [f for f in gd.exponents if f not in fam.sets]
    if missing:
        raise ValueError(f"index family lacks faces {missing}")
    for face, order in gd.exponents.items():
        if order == 0 and fam[face].infimum() <= 0:
            raise IntegrabilityError(
                f"face {face} is mapped to the interior but its index set reaches Re z <= 0"
            )
    scaled = {f: scale(fam[f], e) for f, e in gd.exponents.items() if e > 0}
    parts = list(scaled.values())
    for a, b in gd.corners:
        if a in scaled and b in scaled:
            parts.append(extended_union(scaled[a], scaled[b]))
    out = union_all(parts)
    return out.with_label(f"pushforward to {gd.target}")


# ---------------------------------------------------------------------------
# X-ray and backprojection index maps


def _check_integrable(e: IndexSet) -> None:
    inf = e.infimum()
    if inf <= -1:
        raise IntegrabilityError(f"index set reaches Re z = {inf} <= -1")


def xray_family(k_set: IndexSet) -> IndexFamily:
    """b-density index family of [π̂* f] dΣ du for f with index set K."""
    fam = {}
    for face in (G0, G1, G2):
        pulled = pullback_index(k_set, PI_HAT.exponents[face])
        fam[face] = shift(pulled, 1)  # the factor μ u(1-u) vanishes simply at each face
    return IndexFamily(fam)


def xray_index(e: IndexSet, refined: bool = True) -> IndexSet:
    """Index set of I₀f for f with index set E (inf E > -1).

    refined: {(2z+1, l)} closed under z -> z+2; naive: {(q+2z, p): q >= 1}.
    """
    _check_integrable(e)
    if refined:
        return _affine(e, Fraction(2), Fraction(1), 2, f"xray({e.label})")
    return pushforward_index(xray_family(e), F_HAT, GLANCING).with_label(f"xray-naive({e.label})")


def classify_gamma(gamma) -> str:
    """'even', 'odd' (nonnegative integers) or 'generic', with tolerance 1e-9."""
    g = canon(gamma)
    if isinstance(g, Fraction) and g.denominator == 1 and g >= 0:
        return "even" if g.numerator % 2 == 0 else "odd"
    return "generic"


def singular_backprojection_index(gamma, k: int) -> IndexSet:
    """E_{γ,k}: the local part of the index set of I₀♯(a τ^γ log^k τ χ)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    g = canon(gamma)
    z0 = _mul(_add(g, Fraction(1)), Fraction(1, 2))
    kind = classify_gamma(g)
    top = {"even": k - 1, "odd": k + 1, "generic": k}[kind]
    if top < 0:
        return empty().with_label(f"E[{g},{k}]")
    return progression(z0, top, 1, f"E[{g},{k}]")


def backprojection_index(gamma, k: int) -> IndexSet:
    """N_0 x {0} together with E_{γ,k} (plain union)."""
    e = union(natural(), singular_backprojection_index(gamma, k))
    return e.with_label(f"backprojection({canon(gamma)},{k})")


def backprojection_index_set(k_set: IndexSet) -> IndexSet:
    """Sharp index set of I₀♯g for g with index set K: N_0 ∪ ⋃ E_{γ,k}."""

    def enum(s: float) -> LogMap:
        out = natural().max_logs(s)
        for g, k in k_set.max_logs(2.0 * s - 1.0).items():
            for z, j in singular_backprojection_index(g, k).max_logs(s).items():
                _merge_max(out, z, j)
        return out

    return IndexSet(enum, Fraction(1), f"backprojection({k_set.label})")


def backprojection_index_naive(k_set: IndexSet) -> IndexSet:
    """(N_0 x {0}) ∪̄ {((1+z)/2, p): (z, p) ∈ K}."""
    half = _affine(k_set, Fraction(1, 2), Fraction(1, 2), 0, f"(1+{k_set.label})/2")
    return extended_union(natural(), half).with_label(f"backprojection-naive({k_set.label})")


def backprojection_family(k_set: IndexSet) -> IndexFamily:
    """b-density index family of F̂*(τμ g) dΣ du for g with index set K."""
    weighted = shift(k_set, 2)  # τμ vanishes to second order at the glancing set
    fam = {}
    for face in (G0, G1, G2):
        pulled = pullback_index(weighted, F_HAT.exponents[face])
        fam[face] = shift(pulled, 1)
    return IndexFamily(fam)


def backprojection_index_pushforward(k_set: IndexSet) -> IndexSet:
    """The naive backprojection index set obtained through the pushforward rule.

    The pushforward gives the index set of ρ I₀♯g; shifting by -1 returns
    that of I₀♯g.
    """
    pushed = pushforward_index(backprojection_family(k_set), PI_HAT, BOUNDARY)
    return shift(pushed, -1).with_label(f"backprojection-pushforward({k_set.label})")


def normal_iterate_index(k: int) -> IndexSet:
    """E_k = {(z, p): z ∈ N_0, p <= min(z, k)}."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return from_generators([Generator(0, 1, tuple(range(k + 1)))], f"E_{k}")


def weight_index(e: IndexSet, power) -> IndexSet:
    """Index set after multiplying by τ^power (e.g. power=-1 for the τ⁻¹ weight)."""
    return shift(e, power)


def normal_index(e: IndexSet) -> IndexSet:
    """Index set of I₀♯I₀f for f with index set E (the sharp X-ray and backprojection maps composed)."""
    return backprojection_index_set(xray_index(e)).with_label(f"normal({e.label})")


def weighted_normal_index(e: IndexSet) -> IndexSet:
    """Index set of I₀♯τ⁻¹I₀f for f with index set E."""
    return backprojection_index_set(weight_index(xray_index(e), -1)).with_label(
        f"weighted-normal({e.label})"
    )


# ---------------------------------------------------------------------------
# Checks and export


def check_conditions(e: IndexSet, cutoff: float = 10.0, step: int | None = None) -> dict[str, bool]:
    """Verify conditions (a), (b) and closure under +step on the enumeration below cutoff."""
    pts = e.enumerate_below(cutoff)
    present = {(p.z, p.k) for p in pts}
    cond_a = len(pts) < 10**6
    cond_b = all((p.z, j) in present for p in pts for j in range(p.k))
    st = step if step is not None else e.json_step()
    cond_c = all(
        (_add(p.z, Fraction(st)), p.k) in present for p in pts if re(p.z) + st <= cutoff
    )
    return {"a": cond_a, "b": cond_b, "closure": cond_c}


def enumeration_rows(e: IndexSet, s: float) -> list[tuple[float, float, int]]:
    return [p.as_tuple() for p in e.enumerate_below(s)]


def is_subset_below(e1: IndexSet, e2: IndexSet, s: float) -> bool:
    a, b = e1.max_logs(s), e2.max_logs(s)
    return all(b.get(z, -1) >= k for z, k in a.items())
