"""Shared test fixtures."""

from fractions import Fraction

from platycosms.euclid import Isometry, Lattice, PlatycosmPresentation
from platycosms.linalg import mat, vec


def make_tricosm() -> PlatycosmPresentation:
    """A three-fold screw quotient (hexagonal-type lattice, screw along the
    cube diagonal): a perfectly valid presentation whose exact spectrum
    lives outside the half-integer frequency grid and whose screw axis has
    irrational length scale -- the space this package correctly refuses."""
    rot = mat([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    third = Fraction(1, 3)
    screw = Isometry(rot, vec(third, third, third))
    rot2 = mat([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    screw2 = Isometry(rot2, vec(2 * third, 2 * third, 2 * third))
    lat = Lattice(mat([[1, -1, 0], [0, 1, -1], [1, 1, 1]]))
    ident = Isometry(mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), vec(0, 0, 0))
    return PlatycosmPresentation("tricosm", lat, (ident, screw, screw2))
