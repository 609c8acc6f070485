"""Both kernel backends agree with each other and with the oracle."""

import random

import numpy as np
import oracles
from generators import random_graph

from claimtrace import kernels


def _csr_from(graph):
    index = graph.index()
    return index


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in kernels.available_backends()


def test_backends_agree_on_random_graphs():
    backends = kernels.available_backends()
    rng = random.Random(3)
    for _ in range(60):
        graph, _ = random_graph(rng)
        index = _csr_from(graph)
        for claim_id in graph.claims:
            start = index.pos[claim_id]
            results = {
                name: impl.closure(index.rev_indptr, index.rev_indices, start).tolist()
                for name, impl in backends.items()
            }
            reference = results.pop("python")
            expected = sorted(
                index.pos[n] for n in oracles.backward_closure(graph, claim_id)
            )
            assert reference == expected
            for name, got in results.items():
                assert got == reference, f"{name} disagrees with python"


def test_closure_sorted_and_inclusive():
    indptr = np.array([0, 0, 1, 2], dtype=np.int32)  # 2<-1? encoded rev: 1->0, 2->1
    indices = np.array([0, 1], dtype=np.int32)
    for impl in kernels.available_backends().values():
        out = impl.closure(indptr, indices, 2).tolist()
        assert out == [0, 1, 2]


def test_reaches_early_exit_matches_closure():
    rng = random.Random(5)
    for _ in range(40):
        graph, _ = random_graph(rng)
        index = _csr_from(graph)
        ids = index.ids
        for impl in kernels.available_backends().values():
            for _ in range(5):
                a, b = rng.randrange(len(ids)), rng.randrange(len(ids))
                expected = b in impl.closure(index.fwd_indptr, index.fwd_indices, a).tolist()
                assert impl.reaches(index.fwd_indptr, index.fwd_indices, a, b) == expected
