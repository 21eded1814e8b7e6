"""Exact Laplace spectra of platycosms via symmetrized Fourier modes.

Eigenvalues are tracked through integer "norm keys": the Fourier mode with
dual-lattice frequency (a, b, c) has eigenvalue 4*pi^2*(a^2+b^2+c^2), and
key = 4*(a^2+b^2+c^2) is an exact nonnegative integer once c is a
half-integer.  The multiplicity of a key is the trace of the holonomy
averaging projector on the span of that key's shell:

    mult(key) = (1/m) * sum_j sum_{v in shell, Bj^T v = v} e^(2 pi i v.bj)

evaluated exactly in the Gaussian integers (all preset phases are fourth
roots of unity).  The imaginary part cancels by the v <-> -v pairing and
the result is asserted to be a nonnegative integer.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Optional

from .errors import (
    CharacterSumError,
    UnsupportedCircumferenceError,
    UnsupportedGeometryError,
)
from .euclid import Lattice, PlatycosmPresentation, translation_lattice
from .linalg import Vec3, inv3, mat, mat_mul, transpose, vec

__all__ = [
    "DualVector",
    "OrbitSpec",
    "SpectrumTable",
    "IsospectralVerdict",
    "dual_lattice",
    "shell",
    "multiplicity",
    "orbit_dims",
    "orbits_in_shell",
    "spectrum_table",
    "is_isospectral",
    "circle_spectrum",
]


@dataclass(frozen=True, order=True)
class DualVector:
    """Frequency vector (a, b, c) with c stored as the integer 2c."""

    a: int
    b: int
    c2: int

    @property
    def norm_key(self) -> int:
        return 4 * self.a * self.a + 4 * self.b * self.b + self.c2 * self.c2

    def vector(self) -> Vec3:
        return vec(self.a, self.b, Fraction(self.c2, 2))

    def __neg__(self) -> "DualVector":
        return DualVector(-self.a, -self.b, -self.c2)


@dataclass(frozen=True, order=True)
class OrbitSpec:
    """Canonical label (a >= b >= 0, c >= 0) of the span generated from
    (a, b, c) by sign flips and by swapping the first two frequencies."""

    a: int
    b: int
    c2: int

    def __post_init__(self):
        if not (self.a >= self.b >= 0 and self.c2 >= 0):
            raise ValueError("orbit label must satisfy a >= b >= 0, c >= 0")

    @classmethod
    def of(cls, v: DualVector) -> "OrbitSpec":
        hi, lo = sorted((abs(v.a), abs(v.b)), reverse=True)
        return cls(hi, lo, abs(v.c2))

    def vectors(self) -> tuple[DualVector, ...]:
        out = set()
        for x, y in ((self.a, self.b), (self.b, self.a)):
            for sx in (1, -1):
                for sy in (1, -1):
                    for sz in (1, -1):
                        out.add(DualVector(sx * x, sy * y, sz * self.c2))
        return tuple(sorted(out))


@dataclass(frozen=True)
class SpectrumTable:
    """Sparse exact spectrum: (key, multiplicity) pairs for keys <= max_key.

    Absent keys have multiplicity zero.  Eigenvalues are pi^2 * key.
    """

    max_key: int
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple((int(k), int(m)) for k, m in self.entries)
        )
        keys = [k for k, _ in self.entries]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("entries must be sorted by key without repeats")
        if any(k < 0 or k > self.max_key for k in keys):
            raise ValueError("entry key out of range")
        if any(m <= 0 for _, m in self.entries):
            raise ValueError("stored multiplicities must be positive")
        if self.entries and self.entries[0] != (0, 1):
            raise ValueError("key 0 must carry the single constant eigenfunction")

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def multiplicity_of(self, key: int) -> int:
        if key < 0 or key > self.max_key:
            raise ValueError(f"key {key} outside enumerated range 0..{self.max_key}")
        return self.as_dict().get(key, 0)

    def first_difference(self, other: "SpectrumTable"):
        """Smallest key (up to the shared max_key) where the tables differ,
        as (key, self_mult, other_mult); None if they agree."""
        bound = min(self.max_key, other.max_key)
        d1, d2 = self.as_dict(), other.as_dict()
        for key in sorted(set(d1) | set(d2)):
            if key > bound:
                break
            m1, m2 = d1.get(key, 0), d2.get(key, 0)
            if m1 != m2:
                return key, m1, m2
        return None

    def to_json_dict(self) -> dict:
        return {"max_key": self.max_key, "entries": [list(e) for e in self.entries]}

    def to_csv(self) -> str:
        lines = ["key,eigenvalue_over_pi2,multiplicity"]
        lines.extend(f"{k},{k},{m}" for k, m in self.entries)
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class IsospectralVerdict:
    equal: bool
    max_key: int
    first_differing_key: Optional[int] = None
    left_multiplicity: Optional[int] = None
    right_multiplicity: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "verdict": "equal" if self.equal else "differs",
            "max_key": self.max_key,
            "first_differing_key": self.first_differing_key,
            "left_multiplicity": self.left_multiplicity,
            "right_multiplicity": self.right_multiplicity,
        }


def dual_lattice(L: Lattice) -> Lattice:
    """Lattice of vectors pairing integrally with every vector of L."""
    return Lattice(inv3(transpose(L.basis)))


_HALF_DUAL_BASIS = mat([[1, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 2)]])


def _grid_filter(Lstar: Lattice):
    """Membership test for scan vectors, or None when every (a, b, c/2)
    grid point belongs to Lstar."""
    for row in Lstar.basis:
        if row[0].denominator != 1 or row[1].denominator != 1 or (2 * row[2]).denominator != 1:
            raise UnsupportedGeometryError(
                "dual lattice is not contained in the Z x Z x (1/2)Z grid"
            )
    if Lstar.basis == _HALF_DUAL_BASIS:
        return None

    def member(a: int, b: int, c2: int) -> bool:
        return Lstar.contains(vec(a, b, Fraction(c2, 2)))

    return member


def _scan(key_limit: int, member) -> Iterable[DualVector]:
    """All grid vectors with norm key <= key_limit passing the filter."""
    amax = isqrt(key_limit // 4) if key_limit >= 4 else 0
    for a in range(-amax, amax + 1):
        rem_a = key_limit - 4 * a * a
        bmax = isqrt(rem_a // 4) if rem_a >= 4 else 0
        for b in range(-bmax, bmax + 1):
            rem = rem_a - 4 * b * b
            cmax = isqrt(rem)
            for c2 in range(-cmax, cmax + 1):
                if member is None or member(a, b, c2):
                    yield DualVector(a, b, c2)


def shell(Lstar: Lattice, key: int) -> tuple[DualVector, ...]:
    """All dual vectors of norm key exactly `key`, sorted, closed under
    negation."""
    if key < 0:
        raise ValueError("norm keys are nonnegative")
    member = _grid_filter(Lstar)
    return tuple(sorted(v for v in _scan(key, member) if v.norm_key == key))


# --- holonomy action on dual vectors -----------------------------------------

_SCALE = mat([[1, 0, 0], [0, 1, 0], [0, 0, 2]])
_SCALE_INV = mat([[1, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 2)]])


@lru_cache(maxsize=None)
def _dual_action(P: PlatycosmPresentation):
    """Per-rep action data in scaled coordinates V = (a, b, 2c).

    Returns (m, Lstar, actions); each action is (M, T) where M is the
    matrix of B^T on scaled coordinates and T gives the phase exponent
    4*(v.trans) = a*T0 + b*T1 + c2*T2.  Integer matrices/coefficients are
    demoted to ints for speed; rational ones stay Fractions.
    """
    Lstar = dual_lattice(translation_lattice(P))
    actions = []
    for g in P.holonomy_reps:
        M = mat_mul(mat_mul(_SCALE, transpose(g.rot)), _SCALE_INV)
        T = (4 * g.trans[0], 4 * g.trans[1], 2 * g.trans[2])
        if all(c.denominator == 1 for row in M for c in row):
            M = tuple(tuple(int(c) for c in row) for row in M)
        if all(c.denominator == 1 for c in T):
            T = tuple(int(c) for c in T)
        actions.append((M, T))
    return len(P.holonomy_reps), Lstar, tuple(actions)


def _accumulate_characters(vectors, actions, sums):
    """Add each rep's fixed-vector phases into sums[key] = [re, im].

    Phase exponents must be integers (phases in {1, i, -1, -i}); anything
    else is outside this package's exact arithmetic and raises.
    """
    for v in vectors:
        a, b, c2 = v.a, v.b, v.c2
        key = 4 * a * a + 4 * b * b + c2 * c2
        cell = sums.get(key)
        if cell is None:
            cell = sums[key] = [0, 0]
        for M, T in actions:
            fa = M[0][0] * a + M[0][1] * b + M[0][2] * c2
            if fa != a:
                continue
            fb = M[1][0] * a + M[1][1] * b + M[1][2] * c2
            if fb != b:
                continue
            fc = M[2][0] * a + M[2][1] * b + M[2][2] * c2
            if fc != c2:
                continue
            r = T[0] * a + T[1] * b + T[2] * c2
            if isinstance(r, Fraction):
                if r.denominator != 1:
                    raise UnsupportedGeometryError(
                        "character phase is not a fourth root of unity"
                    )
                r = int(r)
            r &= 3
            if r == 0:
                cell[0] += 1
            elif r == 1:
                cell[1] += 1
            elif r == 2:
                cell[0] -= 1
            else:
                cell[1] -= 1


def _finalize(key: int, cell, m: int) -> int:
    re, im = cell
    if im != 0 or re < 0 or re % m != 0:
        raise CharacterSumError(
            f"character sum at key {key} is ({re} + {im}i)/{m}, "
            "not a nonnegative integer"
        )
    return re // m


def multiplicity(P: PlatycosmPresentation, key: int) -> int:
    """Exact dimension of the holonomy-invariant subspace of the key shell."""
    if key < 0:
        raise ValueError("norm keys are nonnegative")
    m, Lstar, actions = _dual_action(P)
    sums: dict[int, list[int]] = {}
    _accumulate_characters(shell(Lstar, key), actions, sums)
    if key not in sums:
        return 0
    return _finalize(key, sums[key], m)


def orbit_dims(P: PlatycosmPresentation, orbit: OrbitSpec) -> int:
    """Dimension of the symmetrized image of the orbit's span."""
    m, Lstar, actions = _dual_action(P)
    vectors = orbit.vectors()
    member = _grid_filter(Lstar)
    if member is not None:
        missing = [v for v in vectors if not member(v.a, v.b, v.c2)]
        if missing:
            raise ValueError(f"orbit vector {missing[0]} is not in the dual lattice")
    sums: dict[int, list[int]] = {}
    _accumulate_characters(vectors, actions, sums)
    (key,) = sums.keys()
    return _finalize(key, sums[key], m)


def orbits_in_shell(Lstar: Lattice, key: int) -> tuple[OrbitSpec, ...]:
    """Canonical orbit labels partitioning the key shell."""
    return tuple(sorted({OrbitSpec.of(v) for v in shell(Lstar, key)}))


@lru_cache(maxsize=None)
def _spectrum_table_serial(P: PlatycosmPresentation, max_key: int) -> SpectrumTable:
    m, Lstar, actions = _dual_action(P)
    member = _grid_filter(Lstar)
    sums: dict[int, list[int]] = {}
    _accumulate_characters(_scan(max_key, member), actions, sums)
    return _build_table(P, max_key, sums, m)


def _build_table(P, max_key, sums, m) -> SpectrumTable:
    entries = []
    for key in sorted(sums):
        mult = _finalize(key, sums[key], m)
        if mult:
            entries.append((key, mult))
    table = SpectrumTable(max_key, tuple(entries))
    # spot-check the aggregate pass against independent per-key shell sums
    probes = {0, 1, max_key // 2, max_key}
    for key in sorted(p for p in probes if 0 <= p <= max_key):
        if multiplicity(P, key) != table.as_dict().get(key, 0):
            raise CharacterSumError(
                f"aggregate table disagrees with per-key multiplicity at {key}"
            )
    return table


def _spectrum_table_parallel(
    P: PlatycosmPresentation, max_key: int, workers: int
) -> SpectrumTable:
    m, Lstar, actions = _dual_action(P)
    member = _grid_filter(Lstar)
    amax = isqrt(max_key // 4) if max_key >= 4 else 0
    all_a = range(-amax, amax + 1)
    chunks = [list(all_a)[i::workers] for i in range(workers)]

    def run(chunk):
        sums: dict[int, list[int]] = {}
        for a in chunk:
            rem_a = max_key - 4 * a * a
            bmax = isqrt(rem_a // 4) if rem_a >= 4 else 0
            vs = []
            for b in range(-bmax, bmax + 1):
                rem = rem_a - 4 * b * b
                cmax = isqrt(rem)
                for c2 in range(-cmax, cmax + 1):
                    if member is None or member(a, b, c2):
                        vs.append(DualVector(a, b, c2))
            _accumulate_characters(vs, actions, sums)
        return sums

    merged: dict[int, list[int]] = {}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(run, chunks):
            for key, (re, im) in part.items():
                cell = merged.setdefault(key, [0, 0])
                cell[0] += re
                cell[1] += im
    return _build_table(P, max_key, merged, m)


def spectrum_table(
    P: PlatycosmPresentation, max_key: int, workers: int | None = None
) -> SpectrumTable:
    """Multiplicities of every norm key from 0 to max_key."""
    if max_key < 0:
        raise ValueError("max_key must be nonnegative")
    if workers is not None and workers > 1:
        return _spectrum_table_parallel(P, max_key, workers)
    return _spectrum_table_serial(P, max_key)


def is_isospectral(
    P1: PlatycosmPresentation,
    P2: PlatycosmPresentation,
    max_key: int,
    workers: int | None = None,
) -> IsospectralVerdict:
    """Exact key-by-key comparison of two spectra up to max_key."""
    t1 = spectrum_table(P1, max_key, workers)
    t2 = spectrum_table(P2, max_key, workers)
    diff = t1.first_difference(t2)
    if diff is None:
        return IsospectralVerdict(True, max_key)
    key, m1, m2 = diff
    return IsospectralVerdict(False, max_key, key, m1, m2)


def circle_spectrum(circumference, max_key: int) -> SpectrumTable:
    """Spectrum of the circle R/(c Z) in the same pi^2-key normalization.

    Eigenvalues (2 pi n / c)^2 = pi^2 * (4 n^2 / c^2) require 4/c^2 to be
    an integer for keys to be exact (covers c = 1/2 and c = 2).
    """
    c = Fraction(circumference)
    if c <= 0:
        raise UnsupportedCircumferenceError("circumference must be positive")
    if max_key < 0:
        raise ValueError("max_key must be nonnegative")
    scale = Fraction(4) / (c * c)
    if scale.denominator != 1:
        raise UnsupportedCircumferenceError(
            f"circumference {c} gives non-integral norm keys (4/c^2 = {scale})"
        )
    step = int(scale)
    entries = [(0, 1)]
    n = 1
    while step * n * n <= max_key:
        entries.append((step * n * n, 2))
        n += 1
    return SpectrumTable(max_key, tuple(entries))
