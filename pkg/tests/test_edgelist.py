import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronprops.edgelist import format_edgelist, parse_edgelist, read_edgelist, write_edgelist
from kronprops.errors import EdgeListFormatError
from kronprops.model import ModelParams
from kronprops.sampler import GraphSample, sample_dense, sample_stratified


def test_format_small():
    g = GraphSample(ModelParams.of(0.8, 0.6, 0.4, 2), np.array([[1, 3], [0, 1]]), np.array([2]), seed=7)
    assert format_edgelist(g) == "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=7\n0 1\n1 3\n2 2\n"


def test_replicate_in_header():
    g = GraphSample(ModelParams.of(0.8, 0.6, 0.4, 2), np.zeros((0, 2)), np.array([]), seed=1, replicate=4)
    text = format_edgelist(g)
    assert text == "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=1 replicate=4\n"
    assert parse_edgelist(text) == g


def test_complete_k2():
    g = sample_dense(ModelParams.of(1, 1, 1, 2), seed=0)
    lines = format_edgelist(g).splitlines()[1:]
    assert lines == ["0 0", "0 1", "0 2", "0 3", "1 1", "1 2", "1 3", "2 2", "2 3", "3 3"]


@pytest.mark.parametrize("fn", [sample_dense, sample_stratified])
@pytest.mark.parametrize("theta", [(0.8, 0.6, 0.4), (0.1 + 0.2, 0.1, 1 / 3 * 0.3), (0.0, 0.0, 0.0)])
def test_roundtrip_file(tmp_path, fn, theta):
    g = fn(ModelParams.of(*theta, 6), seed=2011, replicate=3)
    path = tmp_path / "g.txt"
    write_edgelist(g, path)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    back = read_edgelist(path)
    assert back == g
    assert back.params.initiator.as_tuple() == g.params.initiator.as_tuple()
    write_edgelist(back, tmp_path / "h.txt")
    assert (tmp_path / "h.txt").read_bytes() == raw


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 1000))
def test_roundtrip_text(seed, rep):
    g = sample_dense(ModelParams.of(0.9, 0.5, 0.2, 3), seed=seed, replicate=rep)
    assert parse_edgelist(format_edgelist(g)) == g


@pytest.mark.parametrize(
    "text",
    [
        "",
        "0 1\n",
        "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4\n",
        "# kron k=2 alpha=0.4 beta=0.6 gamma=0.8 seed=0\n",
        "# kron k=2 alpha=x beta=0.6 gamma=0.4 seed=0\n",
        "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=0\n1 0\n",
        "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=0\n0 4\n",
        "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=0\n0 1\n0 1\n",
        "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=0\n0\t1\n",
        "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=0\n-1 1\n",
        "# kron k=2 alpha=0.8 beta=0.6 gamma=0.4 seed=0\n\n",
    ],
)
def test_malformed(text):
    with pytest.raises(EdgeListFormatError):
        parse_edgelist(text)
