"""Polyhedral ordering cones and the set order relations they induce.

A cone may carry a generator representation (``C = cone(G)``), a dual
representation (``C = {x : <b_i, x> >= 0}``), or both.  Operations dispatch
on whichever representation is available; converting between the two is
deliberately not implemented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .exactlp import (
    ONE,
    ZERO,
    Vec,
    dot,
    feasible_point,
    mat_rank,
    vec,
    vneg,
    vsub,
)

COMPONENTWISE = "componentwise"
HALFSPACE = "halfspace"
DUAL = "dual"
GENERATORS = "generators"


class DimensionMismatchError(ValueError):
    pass


class RepresentationError(ValueError):
    """The operation needs a cone representation that was not supplied."""


def _basis(d: int) -> tuple[Vec, ...]:
    return tuple(
        tuple(ONE if j == i else ZERO for j in range(d)) for i in range(d)
    )


@dataclass(frozen=True)
class Cone:
    dim: int
    kind: str
    generators: Optional[tuple[Vec, ...]] = None
    duals: Optional[tuple[Vec, ...]] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("cone dimension must be >= 1")
        for rep in (self.generators, self.duals):
            if rep is not None:
                for v in rep:
                    if len(v) != self.dim:
                        raise DimensionMismatchError(
                            "cone representation vector has wrong dimension"
                        )
        if self.generators is None and self.duals is None:
            raise RepresentationError("cone needs at least one representation")
        if self.generators is not None and self.duals is not None:
            self._check_consistency()

    # -- constructors -------------------------------------------------------

    @staticmethod
    def componentwise(d: int) -> "Cone":
        return Cone(dim=d, kind=COMPONENTWISE, duals=_basis(d))

    @staticmethod
    def halfspace(w: Iterable) -> "Cone":
        wv = vec(w)
        if all(x == 0 for x in wv):
            raise ValueError("halfspace normal must be nonzero")
        return Cone(dim=len(wv), kind=HALFSPACE, duals=(wv,))

    @staticmethod
    def from_duals(rows: Iterable[Iterable]) -> "Cone":
        duals = tuple(vec(r) for r in rows)
        if not duals:
            raise ValueError("dual representation needs at least one vector")
        return Cone(dim=len(duals[0]), kind=DUAL, duals=duals)

    @staticmethod
    def from_generators(
        gens: Iterable[Iterable], duals: Optional[Iterable[Iterable]] = None
    ) -> "Cone":
        g = tuple(vec(r) for r in gens)
        d = len(g[0]) if g else None
        if d is None:
            raise ValueError("generator representation needs the dimension")
        dd = tuple(vec(r) for r in duals) if duals is not None else None
        return Cone(dim=d, kind=GENERATORS, generators=g, duals=dd)

    # -- consistency of a doubly-represented cone ---------------------------

    def _check_consistency(self):
        # Partial check: every generator must satisfy every dual inequality,
        # and every dual inequality must be tight on at least one generator.
        for g in self.generators:
            for b in self.duals:
                if dot(b, g) < 0:
                    raise ValueError(
                        "inconsistent cone representations: generator "
                        f"{g} violates dual inequality {b}"
                    )
        for b in self.duals:
            if self.generators and not any(dot(b, g) == 0 for g in self.generators):
                raise ValueError(
                    f"dual inequality {b} is tight on no generator; "
                    "representations describe different cones"
                )

    # -- membership and order -----------------------------------------------

    def _check_dim(self, x: Vec):
        if len(x) != self.dim:
            raise DimensionMismatchError(
                f"expected dimension {self.dim}, got {len(x)}"
            )

    def contains(self, x: Iterable) -> bool:
        """Exact membership x in C."""
        xv = vec(x)
        self._check_dim(xv)
        if self.duals is not None:
            return all(dot(b, xv) >= 0 for b in self.duals)
        # generator representation: x = G lambda with lambda >= 0
        gens = self.generators
        if not gens:
            return all(c == 0 for c in xv)
        # columns are generators; solve G lambda = x, lambda >= 0
        a = [[g[i] for g in gens] for i in range(self.dim)]
        from .exactlp import lp_standard

        res = lp_standard(a, list(xv), [ZERO] * len(gens))
        return res.status == "optimal"

    def leq(self, x: Iterable, y: Iterable) -> bool:
        """x precedes y in the cone order, i.e. y - x in C."""
        xv, yv = vec(x), vec(y)
        self._check_dim(xv)
        self._check_dim(yv)
        return self.contains(vsub(yv, xv))

    def is_pointed(self) -> bool:
        """True iff C cap (-C) = {0}."""
        if self.duals is not None:
            return mat_rank(self.duals) == self.dim
        # finitely generated cone: not pointed iff -g in C for a nonzero g
        for g in self.generators:
            if any(c != 0 for c in g) and self.contains(vneg(g)):
                return False
        return True

    def is_solid(self) -> bool:
        """True iff C has nonempty interior."""
        if self.duals is not None:
            # exists x with <b_i, x> >= 1 for all i (scale invariance)
            return (
                feasible_point(a_ge=list(self.duals), b_ge=[ONE] * len(self.duals))
                is not None
            )
        return mat_rank(self.generators) == self.dim

    # -- set order relations -------------------------------------------------

    def set_precurly(self, a: Iterable[Iterable], b: Iterable[Iterable]) -> bool:
        """A precurly B, i.e. B subset of A + C."""
        av = [vec(x) for x in a]
        bv = [vec(x) for x in b]
        return all(any(self.leq(x, y) for x in av) for y in bv)

    def set_curlyprec(self, a: Iterable[Iterable], b: Iterable[Iterable]) -> bool:
        """A curlyprec B, i.e. A subset of B - C."""
        av = [vec(x) for x in a]
        bv = [vec(x) for x in b]
        return all(any(self.leq(x, y) for y in bv) for x in av)


def minimal_elements(points: Iterable[Iterable], cone: Cone) -> list[Vec]:
    """Elements not strictly dominated by another element of the set.

    Requires a pointed cone so that strict dominance (leq and not equal)
    is unambiguous.
    """
    from .errors import UnsupportedConeError

    if not cone.is_pointed():
        raise UnsupportedConeError("minimal elements need a pointed cone")
    pts = []
    for p in (vec(x) for x in points):
        if p not in pts:
            pts.append(p)
    return [
        p
        for p in pts
        if not any(q != p and cone.leq(q, p) for q in pts)
    ]
