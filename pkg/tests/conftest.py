import time

import pytest

from growthlab import decompose, greedy_cover_certificate
from growthlab.recipes import generate_example


@pytest.fixture(scope="session")
def pipeline_instances():
    """The three decomposition instances, computed once per test session.

    The torsion-free one enumerates a progression of half a million
    elements, so everything downstream (decomposition assertions and both
    corollary covers) shares this fixture instead of recomputing.
    """
    out = {}
    for tag, group in (("mod3", "ut:3:3"), ("mod5", "ut:3:5"), ("free", "ut:3:0")):
        A = generate_example(f"ball {group} radius=1")
        cert = greedy_cover_certificate(A)
        t0 = time.monotonic()
        dec = decompose(cert)
        out[tag] = {"cert": cert, "dec": dec, "seconds": time.monotonic() - t0}
    return out
