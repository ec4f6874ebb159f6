import random

import pytest

from fibercalc.fiber_model import FiberGraph, build_fiber, parse_fiber

KODAIRA_II = """\
fiber "II"
blowups 3
component C1 mult=1 self=-6
component E2 mult=2 self=-3
component E3 mult=3 self=-2
component E6 mult=6 self=-1
node C1 E6
node E2 E6
node E3 E6
"""

I0_STAR = """\
fiber "I0*"
component z mult=2 self=-2
component a mult=1 self=-2
component b mult=1 self=-2
component c mult=1 self=-2
component d mult=1 self=-2
node z a
node z b
node z c
node z d
"""

NODAL_CUBIC = """\
fiber "I1"
component C mult=1 self=0
node C C
"""


@pytest.fixture
def kodaira_ii() -> FiberGraph:
    return parse_fiber(KODAIRA_II)


@pytest.fixture
def i0_star() -> FiberGraph:
    return parse_fiber(I0_STAR)


@pytest.fixture
def nodal_cubic() -> FiberGraph:
    return parse_fiber(NODAL_CUBIC)


def relabel(f: FiberGraph, rng: random.Random) -> FiberGraph:
    """Same fiber with shuffled component order and fresh ids."""
    comps = list(f.components)
    rng.shuffle(comps)
    fresh = {c.id: f"v{rng.randrange(10**9)}_{i}" for i, c in enumerate(comps)}
    nodes = [(fresh[e.a], fresh[e.b], e.count) for e in f.nodes]
    rng.shuffle(nodes)
    return build_fiber(
        f.name,
        [(fresh[c.id], c.mult, c.self_int, c.genus) for c in comps],
        nodes,
        f.blowups,
        f.record,
    )
