import numpy as np
import pytest
from hypothesis import given, settings, strategies as hs

from nonnormal.batch import (
    FrameBatch, assignment_grid, iter_relation_space, nabla_table, relation_space, row_keys,
    selection_table, star_batch, supported_batch,
)
from nonnormal.correspondence import enumerate_cframes, enumerate_nframes, enumerate_two_sorted
from nonnormal.semantics import eval_mt, star, unstar
from nonnormal.syntax import N, S, variables

from gen import COND_ALL, NABLA_ALL, mt_formulas, two_sorted


def _check_batch(frames, f):
    batch = FrameBatch.from_frames(frames)
    names = sorted(variables(f))
    env = assignment_grid({n: batch.nx for n in names})
    got = batch.evaluate(f, env)
    width = len(next(iter(env.values()))) if env else 1
    got = np.broadcast_to(got, (len(frames), width))
    for i, K in enumerate(frames):
        for j in range(width):
            V = {n: int(env[n][j]) for n in names}
            assert int(got[i, j]) == eval_mt(K, V, f)


@settings(max_examples=150, deadline=None)
@given(hs.data(), hs.integers(1, 2), hs.integers(1, 3))
def test_evaluate_matches_single_frame_evaluator_n(data, nx, ny):
    frames = data.draw(hs.lists(two_sorted("n", nx, ny, nx, ny),
                                min_size=1, max_size=4))
    sort = data.draw(hs.sampled_from([S, N]))
    f = data.draw(mt_formulas(sort, 3, NABLA_ALL, names=("p", "q")))
    _check_batch(frames, f)


@settings(max_examples=150, deadline=None)
@given(hs.data(), hs.integers(1, 2), hs.integers(1, 3))
def test_evaluate_matches_single_frame_evaluator_c(data, nx, ny):
    frames = data.draw(hs.lists(two_sorted("c", nx, ny, nx, ny),
                                min_size=1, max_size=4))
    sort = data.draw(hs.sampled_from([S, N]))
    f = data.draw(mt_formulas(sort, 3, COND_ALL, names=("p", "q")))
    _check_batch(frames, f)


@pytest.mark.parametrize("nx,ny", [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)])
def test_supported_batch_matches_enumeration(nx, ny):
    batch = supported_batch(nx, ny)
    got = {batch.frame(i) for i in range(len(batch))}
    assert len(got) == len(batch)
    assert got == set(enumerate_two_sorted(nx, ny, supported_only=True))


def test_relation_space_sizes_and_chunks():
    rels = ["ni", "notni", "tf"]
    whole = relation_space("c", 1, 2, rels)
    assert len(whole) == 4 * 4 * 4
    parts = list(iter_relation_space("c", 1, 2, rels, chunk=7))
    glued = [p.frame(i) for p in parts for i in range(len(p))]
    assert glued == [whole.frame(i) for i in range(len(whole))]
    assert set(glued) == set(enumerate_two_sorted(1, 2, kind="c"))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_star_batch_and_nabla_table(n):
    frames = list(enumerate_nframes(n))
    batch = star_batch(frames)
    tab = nabla_table(batch)
    for i in range(0, len(frames), max(1, len(frames) // 200)):
        F = frames[i]
        assert batch.frame(i) == star(F)
        # column D holds the worlds having D as a neighbourhood
        for d in range(1 << n):
            assert int(tab[i, d]) == sum(1 << w for w in range(n) if F.nu[w] >> d & 1)


@pytest.mark.parametrize("n", [1, 2])
def test_selection_table_inverts_star(n):
    frames = list(enumerate_cframes(n))
    batch = star_batch(frames)
    sel = selection_table(batch)
    for i in range(0, len(frames), max(1, len(frames) // 500)):
        assert tuple(map(tuple, sel[i].tolist())) == frames[i].f


@settings(max_examples=100, deadline=None)
@given(hs.lists(two_sorted("c", 2, 3, 2, 3), min_size=1, max_size=5))
def test_selection_table_matches_unstar(frames):
    sel = selection_table(FrameBatch.from_frames(frames))
    for i, K in enumerate(frames):
        assert tuple(map(tuple, sel[i].tolist())) == unstar(K).f


def test_row_keys_are_injective():
    rng = np.random.default_rng(7)
    table = rng.integers(0, 8, size=(500, 6))
    keys = row_keys(table, 3)
    rows = {tuple(r) for r in table.tolist()}
    assert len(set(keys.tolist())) == len(rows)
    with pytest.raises(ValueError):
        row_keys(np.zeros((1, 40), dtype=np.int64), 2)
