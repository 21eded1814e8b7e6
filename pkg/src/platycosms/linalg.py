"""Exact rational and integer linear algebra for small (3x3) problems.

Vectors are tuples of Fraction, matrices are row tuples of such vectors.
Everything here is exact; no floating point enters any routine.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

Vec3 = tuple[Fraction, Fraction, Fraction]
Mat3 = tuple[Vec3, Vec3, Vec3]


def vec(x, y, z) -> Vec3:
    return (Fraction(x), Fraction(y), Fraction(z))


def mat(rows) -> Mat3:
    return tuple(vec(*row) for row in rows)  # type: ignore[return-value]


IDENTITY: Mat3 = mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
ZERO_VEC: Vec3 = vec(0, 0, 0)


def vec_add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vec_sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vec_neg(a: Vec3) -> Vec3:
    return (-a[0], -a[1], -a[2])


def vec_scale(c, a: Vec3) -> Vec3:
    c = Fraction(c)
    return (c * a[0], c * a[1], c * a[2])


def dot(a: Vec3, b: Vec3) -> Fraction:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def mat_vec(m: Mat3, v: Vec3) -> Vec3:
    return (dot(m[0], v), dot(m[1], v), dot(m[2], v))


def mat_mul(a: Mat3, b: Mat3) -> Mat3:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)  # type: ignore[return-value]


def transpose(m: Mat3) -> Mat3:
    return tuple(zip(*m))  # type: ignore[return-value]


def mat_sub(a: Mat3, b: Mat3) -> Mat3:
    return tuple(vec_sub(ra, rb) for ra, rb in zip(a, b))  # type: ignore[return-value]


def det3(m: Mat3) -> Fraction:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def inv3(m: Mat3) -> Mat3:
    """Inverse via the adjugate; raises ZeroDivisionError on singular input."""
    d = det3(m)
    cof = [
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            -(m[1][0] * m[2][2] - m[1][2] * m[2][0]),
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
        ],
        [
            -(m[0][1] * m[2][2] - m[0][2] * m[2][1]),
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            -(m[0][0] * m[2][1] - m[0][1] * m[2][0]),
        ],
        [
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
            -(m[0][0] * m[1][2] - m[0][2] * m[1][0]),
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ]
    return tuple(tuple(cof[j][i] / d for j in range(3)) for i in range(3))  # type: ignore[return-value]


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a small rational matrix by Gaussian elimination."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return r


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int = 3) -> list[Vec3]:
    """Basis of {v : M v = 0} for a rational matrix with `ncols` columns."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [a / m[r][c] for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(tuple(v))
    return basis  # type: ignore[return-value]


def fraction_to_str(f: Fraction) -> str:
    """Render as "p/q", or plain "p" when the denominator is 1."""
    f = Fraction(f)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def fraction_from_str(s: str) -> Fraction:
    return Fraction(s)


def fraction_sqrt(f: Fraction):
    """Exact square root of a nonnegative rational, or None if irrational."""
    f = Fraction(f)
    if f < 0:
        raise ValueError("negative radicand")
    pn, pd = isqrt(f.numerator), isqrt(f.denominator)
    if pn * pn == f.numerator and pd * pd == f.denominator:
        return Fraction(pn, pd)
    return None


def fraction_gcd(values: Sequence[Fraction]) -> Fraction:
    """gcd of rationals: the positive generator of the group they generate."""
    num = 0
    den = 1
    for v in values:
        v = Fraction(v)
        num = gcd(num * v.denominator, v.numerator * den)
        den = den * v.denominator
    return Fraction(num, den)


def primitive_integer_vector(v: Vec3) -> tuple[int, int, int]:
    """Scale a nonzero rational vector to coprime integers, first nonzero > 0."""
    den = 1
    for c in v:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in v]
    g = gcd(gcd(abs(ints[0]), abs(ints[1])), abs(ints[2]))
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    ints = [c // g for c in ints]
    lead = next(c for c in ints if c != 0)
    if lead < 0:
        ints = [-c for c in ints]
    return tuple(ints)  # type: ignore[return-value]


# --- integer lattice algorithms -------------------------------------------


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form (nonzero rows only, positive pivots).

    Pivot columns are echeloned left to right; entries above a pivot are
    reduced into [0, pivot). The returned rows generate the same integer
    row lattice as the input.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    row = 0
    for col in range(ncols):
        # clear the column below `row` by gcd steps
        while True:
            nz = [i for i in range(row, len(m)) if m[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(m[i][col]))
            m[row], m[piv] = m[piv], m[row]
            if m[row][col] < 0:
                m[row] = [-a for a in m[row]]
            done = True
            for i in range(row + 1, len(m)):
                if m[i][col] != 0:
                    q = m[i][col] // m[row][col]
                    m[i] = [a - q * b for a, b in zip(m[i], m[row])]
                    if m[i][col] != 0:
                        done = False
            if done:
                break
        if row < len(m) and m[row][col] != 0:
            for i in range(row):
                q = m[i][col] // m[row][col]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[row])]
            row += 1
            if row == len(m):
                break
    return [r for r in m if any(r)]


def smith_normal_form(a: Sequence[Sequence[int]]):
    """Diagonalize over Z: returns (d, u, v) with u·a·v = d, u and v unimodular.

    d is diagonal (as a full matrix). The divisibility chain of the true
    Smith form is not enforced; a diagonal form is all the solvers below
    need. Works for any small m x n integer matrix.
    """
    m = [list(r) for r in a]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):
        m[dst] = [x - q * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):
        for r in m:
            r[dst] -= q * r[src]
        for r in v:
            r[dst] -= q * r[src]

    t = 0
    while t < min(nr, nc):
        # find a pivot
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] != 0:
                    if piv is None or abs(m[i][j]) < abs(m[piv[0]][piv[1]]):
                        piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            reduced = True
            for i in range(t + 1, nr):
                if m[i][t] != 0:
                    add_row(t, i, m[i][t] // m[t][t])
                    if m[i][t] != 0:
                        swap_rows(t, i)
                        reduced = False
            for j in range(t + 1, nc):
                if m[t][j] != 0:
                    add_col(t, j, m[t][j] // m[t][t])
                    if m[t][j] != 0:
                        swap_cols(t, j)
                        reduced = False
            if reduced:
                break
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return m, u, v


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int]):
    """One integer solution x of a·x = b, or None if none exists."""
    nr = len(a)
    nc = len(a[0]) if nr else 0
    d, u, v = smith_normal_form(a)
    ub = [sum(u[i][j] * b[j] for j in range(nr)) for i in range(nr)]
    y = [0] * nc
    for i in range(min(nr, nc)):
        di = d[i][i]
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di != 0:
                return None
            y[i] = ub[i] // di
    for i in range(min(nr, nc), nr):
        if ub[i] != 0:
            return None
    return [sum(v[i][j] * y[j] for j in range(nc)) for i in range(nc)]


def integer_kernel(a: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of {x in Z^n : a·x = 0}."""
    nr = len(a)
    nc = len(a[0]) if nr else 0
    d, _u, v = smith_normal_form(a)
    basis = []
    for j in range(nc):
        dj = d[j][j] if j < min(nr, nc) else 0
        if dj == 0:
            basis.append([v[i][j] for i in range(nc)])
    return basis


def solve_rational_in_lattice(
    a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
):
    """Integer solution x of the rational system a·x = b, or None.

    Clears denominators and delegates to the Smith-normal-form solver.
    """
    den = 1
    for row in a:
        for c in row:
            f = Fraction(c)
            den = den * f.denominator // gcd(den, f.denominator)
    for c in b:
        f = Fraction(c)
        den = den * f.denominator // gcd(den, f.denominator)
    ai = [[int(Fraction(c) * den) for c in row] for row in a]
    bi = [int(Fraction(c) * den) for c in b]
    return solve_integer(ai, bi)
