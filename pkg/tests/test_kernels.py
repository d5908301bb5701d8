import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deptw import _kernels
from deptw.qbf import PrimalGraph

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return PrimalGraph.from_edges(range(n), edges)


@settings(max_examples=80, deadline=None)
@given(graphs(), st.data())
def test_backends_agree(g, data):
    n = len(g.vertices)
    indptr, indices = g.csr
    adj = g.adj_matrix
    in_d = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)), dtype=np.bool_)
    d = data.draw(st.integers(0, n - 1))
    in_d[d] = True
    assert _kernels.backdegree_numpy(adj, in_d, d) == _kernels.backdegree_numba(indptr, indices, in_d, d)
    order = np.array(data.draw(st.permutations(range(n))), dtype=np.int64)
    assert _kernels.elimination_width_numpy(adj, order) == _kernels.elimination_width_numba(adj, order)
    blocked = np.array(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)), dtype=np.bool_)
    assert np.array_equal(
        _kernels.component_labels_numpy(adj, blocked),
        _kernels.component_labels_numba(indptr, indices, blocked),
    )


def test_component_labels_match_graph_components():
    g = PrimalGraph.from_edges(range(6), [(0, 1), (2, 3), (3, 4)])
    labels = _kernels.component_labels(g, np.zeros(6, dtype=np.bool_))
    assert labels.tolist() == [0, 0, 1, 1, 1, 2]


def test_backend_name():
    assert _kernels.backend() in ("numba", "numpy")
