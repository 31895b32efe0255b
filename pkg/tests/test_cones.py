import json
import random
from fractions import Fraction

import pytest

from robust_vdp import Cone, UnsupportedConeError, minimal_elements
from robust_vdp.cones import DimensionMismatchError, RepresentationError
from robust_vdp.data import read_text
from robust_vdp.instance import _parse_cone

F = Fraction


@pytest.fixture
def roof():
    """Pointed 3d cone with eight generators and eight facets."""
    return _parse_cone(json.loads(read_text("cone_roof3d.json")), 3, "/")


def test_componentwise_membership():
    c = Cone.componentwise(2)
    assert c.contains((1, 0))
    assert c.contains((0, 0))
    assert not c.contains((-1, 2))
    assert c.leq((1, 1), (2, 1))
    assert not c.leq((1, 1), (0, 2))


def test_halfspace_membership():
    c = Cone.halfspace((1, 2))
    assert c.contains((2, -1))
    assert c.contains((-2, 1))
    assert not c.contains((-3, 1))
    assert not c.is_pointed()
    assert c.is_solid()


def test_dimension_checks():
    c = Cone.componentwise(2)
    with pytest.raises(DimensionMismatchError):
        c.contains((1, 2, 3))
    with pytest.raises(DimensionMismatchError):
        c.leq((1,), (2,))


def test_needs_some_representation():
    with pytest.raises(RepresentationError):
        Cone(dim=2, kind="dual")


def test_inconsistent_representations_rejected():
    with pytest.raises(ValueError):
        Cone.from_generators([(1, 0), (0, 1)], duals=[(-1, 0)])


def test_generator_membership_by_lp():
    c = Cone.from_generators([(1, 0), (1, 1)])
    assert c.contains((2, 1))       # 1*(1,0) + 1*(1,1)
    assert c.contains((1, 0))
    assert not c.contains((0, 1))   # outside the wedge
    assert not c.contains((-1, 0))


def test_roof_representations_agree(roof):
    # membership via duals must match membership via generators alone
    gens_only = Cone.from_generators(roof.generators)
    rng = random.Random(3)
    for _ in range(60):
        x = tuple(F(rng.randint(-4, 4), rng.choice((1, 2))) for _ in range(3))
        assert roof.contains(x) == gens_only.contains(x)


def test_roof_pointed_and_solid(roof):
    assert roof.is_pointed()
    assert roof.is_solid()
    gens_only = Cone.from_generators(roof.generators)
    assert gens_only.is_pointed()
    assert gens_only.is_solid()


def test_pointedness_of_halfplane_generators():
    c = Cone.from_generators([(1, 0), (-1, 0), (0, 1)])
    assert not c.is_pointed()


def test_not_solid_cone():
    c = Cone.from_duals([(1, 0), (-1, 0)])  # the y-axis
    assert not c.is_solid()


def test_order_axioms_randomized():
    rng = random.Random(11)
    cones = [
        Cone.componentwise(3),
        Cone.halfspace((1, -2, 3)),
        Cone.from_duals([(1, 1, 0), (0, 1, 1)]),
    ]
    for cone in cones:
        for _ in range(40):
            x, y, z = (
                tuple(F(rng.randint(-6, 6), rng.choice((1, 2, 4))) for _ in range(3))
                for _ in range(3)
            )
            assert cone.leq(x, x)  # reflexivity
            if cone.leq(x, y) and cone.leq(y, z):
                assert cone.leq(x, z)  # transitivity
            if cone.leq(x, y):  # translation and scaling compatibility
                assert cone.leq(tuple(a + b for a, b in zip(x, z)),
                                tuple(a + b for a, b in zip(y, z)))
                lam = F(rng.randint(0, 5), rng.choice((1, 2)))
                assert cone.leq(tuple(lam * a for a in x),
                                tuple(lam * a for a in y))


def test_set_relations():
    c = Cone.componentwise(2)
    a = [(0, 0), (2, -1)]
    b = [(1, 1), (3, 0)]
    assert c.set_precurly(a, b)        # B inside A + C
    assert not c.set_precurly(b, a)
    assert c.set_curlyprec(a, b)       # A inside B - C
    assert not c.set_curlyprec(b, a)


def test_minimal_elements():
    c = Cone.componentwise(2)
    pts = [(0, 3), (1, 1), (2, 0), (2, 2), (1, 1)]
    assert set(minimal_elements(pts, c)) == {
        (F(0), F(3)), (F(1), F(1)), (F(2), F(0)),
    }


def test_minimal_elements_needs_pointed_cone():
    with pytest.raises(UnsupportedConeError):
        minimal_elements([(0, 0)], Cone.halfspace((1, 1)))
