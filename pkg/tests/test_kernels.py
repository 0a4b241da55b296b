import os
import random
import subprocess
import sys
from array import array

import pytest

from spectrim import _reach, _reach_py


def random_csr(rng, n, avg_degree):
    adjacency = [[rng.randrange(n) for _ in range(rng.randint(0, 2 * avg_degree))] for _ in range(n)]
    indptr, indices = array("q", [0]), array("q")
    for targets in adjacency:
        indices.extend(targets)
        indptr.append(len(indices))
    entries = array("q", rng.sample(range(n), min(n, rng.randint(0, 5))))
    return indptr, indices, entries


def test_compiled_kernel_is_built():
    assert "cython" in _reach.available_kernels(), "build the extension with pip install -e ."


@pytest.mark.parametrize("seed", range(20))
def test_kernels_agree(seed):
    rng = random.Random(seed)
    kernels = _reach.available_kernels()
    graph = random_csr(rng, rng.randint(1, 3000), 2)
    results = {name: bytes(k(*graph)) for name, k in kernels.items()}
    assert len(set(results.values())) == 1


def test_empty_graph():
    for k in _reach.available_kernels().values():
        assert k(array("q", [0]), array("q"), array("q")) == bytearray()


def test_chain():
    indptr, indices = array("q", [0, 1, 2, 2]), array("q", [1, 2])
    assert list(_reach_py.reach(indptr, indices, array("q", [0]))) == [1, 1, 1]
    assert list(_reach_py.reach(indptr, indices, array("q", [1]))) == [0, 1, 1]


def test_pure_python_switch():
    env = dict(os.environ, SPECTRIM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import spectrim._reach as r; print(r.IMPLEMENTATION)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
