"""Cubics Y^2 Z = X^3 + a X^2 Z + b X Z^2 + c Z^3 and their chord-tangent law.

The coefficient field is anything with exact ``+ - * /`` and ``== 0``:
:class:`fractions.Fraction` and :class:`~twistdioph.exact.RationalFunction`
are the two instantiations used in the package.  The origin is (0:1:0).
"""

from fractions import Fraction
from typing import List

from .errors import OffCurve, SingularCurve
from .exact import Polynomial, RationalFunction, rational_roots

__all__ = [
    "CubicCurve",
    "ProjectivePoint",
    "curve_new",
    "add_points",
    "neg_point",
    "mul_point",
    "two_torsion",
    "is_torsion_over_Q",
    "j_invariant",
    "cm_heuristic_no_cm",
    "cubic_discriminant",
    "TORSION_SEARCH_BOUND",
]

TORSION_SEARCH_BOUND = 16


def _field(x):
    if isinstance(x, (RationalFunction, Fraction)):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x)
    return Fraction(x)


def cubic_discriminant(a, b, c):
    """Discriminant of x^3 + a x^2 + b x + c."""
    return a * a * b * b - 4 * b ** 3 - 4 * a ** 3 * c - 27 * c * c + 18 * a * b * c


class ProjectivePoint:
    """A point (X:Y:Z); the last nonzero of Z, Y, X is scaled to 1."""

    __slots__ = ("X", "Y", "Z")

    def __init__(self, X, Y, Z=1):
        X, Y, Z = _field(X), _field(Y), _field(Z)
        for pivot in (Z, Y, X):
            if pivot != 0:
                break
        else:
            raise ValueError("(0:0:0) is not a projective point")
        if pivot != 1:
            X, Y, Z = X / pivot, Y / pivot, Z / pivot
        self.X, self.Y, self.Z = X, Y, Z

    @classmethod
    def origin(cls, like=None):
        one = _field(1) if like is None else like
        zero = one - one
        return cls(zero, one, zero)

    def is_origin(self) -> bool:
        return self.Z == 0

    @property
    def xy(self):
        if self.is_origin():
            raise ValueError("the origin has no affine coordinates")
        return self.X, self.Y

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.X == other.X and self.Y == other.Y and self.Z == other.Z

    def __hash__(self):
        return hash((self.X, self.Y, self.Z))

    def __repr__(self):
        return f"ProjectivePoint({self.X}, {self.Y}, {self.Z})"

    def __str__(self):
        return f"({self.X}:{self.Y}:{self.Z})"


class CubicCurve:
    """y^2 = x^3 + a x^2 + b x + c with nonzero discriminant."""

    def __init__(self, a, b, c):
        self.a, self.b, self.c = _field(a), _field(b), _field(c)
        self.disc = cubic_discriminant(self.a, self.b, self.c)
        if self.disc == 0:
            raise SingularCurve(f"x^3 + ({self.a})x^2 + ({self.b})x + ({self.c}) has a repeated root")
        one = self.a - self.a + 1
        self._one = one
        self.O = ProjectivePoint.origin(one)

    def rhs(self, x):
        return ((x + self.a) * x + self.b) * x + self.c

    def contains(self, P: ProjectivePoint) -> bool:
        X, Y, Z = P.X, P.Y, P.Z
        return Y * Y * Z == X ** 3 + self.a * X * X * Z + self.b * X * Z * Z + self.c * Z ** 3

    def point(self, x, y) -> ProjectivePoint:
        P = ProjectivePoint(x, y, self._one)
        if not self.contains(P):
            raise OffCurve(f"({x}, {y}) is not on {self}")
        return P

    def check(self, P: ProjectivePoint) -> ProjectivePoint:
        if not self.contains(P):
            raise OffCurve(f"{P} is not on {self}")
        return P

    def neg(self, P: ProjectivePoint) -> ProjectivePoint:
        return ProjectivePoint(P.X, -P.Y, P.Z)

    def add(self, P: ProjectivePoint, Q: ProjectivePoint) -> ProjectivePoint:
        if P.is_origin():
            return Q
        if Q.is_origin():
            return P
        x1, y1 = P.xy
        x2, y2 = Q.xy
        if x1 == x2:
            if y1 + y2 == 0:
                return self.O
            # tangent
            m = (3 * x1 * x1 + 2 * self.a * x1 + self.b) / (2 * y1)
        else:
            m = (y2 - y1) / (x2 - x1)
        x3 = m * m - self.a - x1 - x2
        y3 = m * (x1 - x3) - y1
        return ProjectivePoint(x3, y3, self._one)

    def mul(self, n: int, P: ProjectivePoint) -> ProjectivePoint:
        if n < 0:
            return self.mul(-n, self.neg(P))
        R = self.O
        Q = P
        while n:
            if n & 1:
                R = self.add(R, Q)
            n >>= 1
            if n:
                Q = self.add(Q, Q)
        return R

    def j_invariant(self):
        a, b, c = self.a, self.b, self.c
        b2, b4, b6 = 4 * a, 2 * b, 4 * c
        b8 = 4 * a * c - b * b
        c4 = b2 * b2 - 24 * b4
        delta = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        return c4 ** 3 / delta

    def cubic(self) -> Polynomial:
        """x^3 + a x^2 + b x + c as a polynomial (rational coefficients only)."""
        return Polynomial([self.c, self.b, self.a, 1])

    def __eq__(self, other):
        if not isinstance(other, CubicCurve):
            return NotImplemented
        return (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def __repr__(self):
        return f"CubicCurve({self.a}, {self.b}, {self.c})"


def curve_new(a, b, c) -> CubicCurve:
    return CubicCurve(a, b, c)


def add_points(C: CubicCurve, P: ProjectivePoint, Q: ProjectivePoint) -> ProjectivePoint:
    return C.add(P, Q)


def neg_point(C: CubicCurve, P: ProjectivePoint) -> ProjectivePoint:
    return C.neg(P)


def mul_point(C: CubicCurve, n: int, P: ProjectivePoint) -> ProjectivePoint:
    return C.mul(n, P)


def two_torsion(C: CubicCurve) -> List[ProjectivePoint]:
    """O followed by (xi:0:1) for the rational roots xi, ascending."""
    pts = [C.O]
    for xi in rational_roots(C.cubic()):
        pts.append(ProjectivePoint(xi, 0, 1))
    return pts


def is_torsion_over_Q(C: CubicCurve, P: ProjectivePoint, bound: int = TORSION_SEARCH_BOUND) -> bool:
    """True iff kP = O for some 1 <= k <= bound (Mazur: orders are at most 12)."""
    R = P
    for _ in range(bound):
        if R.is_origin():
            return True
        R = C.add(R, P)
    return False


def j_invariant(C: CubicCurve):
    return C.j_invariant()


def cm_heuristic_no_cm(C: CubicCurve) -> bool:
    """True means certified without CM (j not an integer); False means unknown."""
    j = C.j_invariant()
    return Fraction(j).denominator != 1
