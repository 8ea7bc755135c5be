import json

import pytest

from torusheight.serialize import dumps
from torusheight.verify import Sizes, property_names, run_property, verify_suite

SMALL = Sizes(2, 3, 6)


def test_every_property_passes_at_small_size():
    rep = verify_suite(11, SMALL)
    assert rep["passed"], json.dumps(rep["failures"], indent=1)[:2000]
    assert {p["name"] for p in rep["properties"]} == set(property_names())


def test_repeated_seed_gives_identical_report():
    names = ["dual_route_degree", "ff_height_subadditive_and_homogeneous", "kronecker"]
    assert dumps(verify_suite(5, SMALL, names)) == dumps(verify_suite(5, SMALL, names))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_single_property_runs_clean(seed):
    r = run_property("divisor_degree_sandwich", seed, SMALL)
    assert r.failures == 0 and r.instances + r.skipped == SMALL.instances


def test_sizes_parse():
    assert Sizes.parse("2..5", 100) == Sizes(2, 5, 100)
    assert Sizes.parse("3", 10) == Sizes(3, 3, 10)
    with pytest.raises(ValueError):
        Sizes.parse("4..2")


def test_unknown_property():
    with pytest.raises(ValueError):
        verify_suite(0, SMALL, ["nope"])
