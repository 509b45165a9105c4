import os
import subprocess
import sys

SCRIPT = """
from seedmatch import _accel, CorrelatedPairSpec, PointMass, sample_correlated_pair, exact_match, sgm_match
pair = sample_correlated_pair(CorrelatedPairSpec(8, 2, 0.4, PointMass(0.5)), 3)
e = exact_match(pair.g1, pair.g2, pair.partition)
s = sgm_match(pair.g1, pair.g2, pair.partition)
print(_accel.backend_name(), e.full_disagreements, s.full_disagreements, list(s.matching.assignment))
"""


def _run(flag):
    env = dict(os.environ)
    env.pop("SEEDMATCH_DISABLE_NUMBA", None)
    if flag is not None:
        env["SEEDMATCH_DISABLE_NUMBA"] = flag
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return out.stdout.split(maxsplit=1)


def test_flag_selects_fallback_with_identical_results():
    fast_name, fast = _run(None)
    slow_name, slow = _run("1")
    assert fast_name == "numba" and slow_name == "numpy"
    assert fast == slow
    assert _run("0")[0] == "numba"
