import collections
import itertools
import json
from math import factorial

import pytest

from uslsq.block_design import eta as design_eta
from uslsq.classify import (ClassificationResult, IncompleteRunError,
                            classify_uniform, load_classification,
                            naive_classify, write_classification)
from uslsq.isomorph import design_certificate
from uslsq.sls_core import dual, underlying_design, uniformity, validate

# (n, mu) cases small enough for the no-symmetry oracle below
ORACLE_CASES = [(3, 1), (3, 2), (4, 1)]


def enumerate_solutions(n: int, mu: int) -> set:
    """Every multiset of permutation-matrix blocks covering each off-row,
    off-column position pair exactly mu times.  No symmetry reduction and
    no shared code with the production search."""
    perms = list(itertools.permutations(range(n)))
    pair_id = {}
    pair_list = []
    for u in range(n * n):
        for w in range(u + 1, n * n):
            if u // n != w // n and u % n != w % n:
                pair_id[(u, w)] = len(pair_list)
                pair_list.append((u, w))
    covers = []
    for p in perms:
        cells = sorted(i * n + p[i] for i in range(n))
        covers.append(tuple(pair_id[e]
                            for e in itertools.combinations(cells, 2)))
    by_pair = [[] for _ in pair_list]
    for bi, ids in enumerate(covers):
        for e in ids:
            by_pair[e].append(bi)
    need = [mu] * len(pair_list)
    counts = collections.Counter()
    found = set()

    def dfs():
        e = next((i for i, v in enumerate(need) if v), None)
        if e is None:
            found.add(tuple(sorted(counts.items())))
            return
        for b in by_pair[e]:
            if all(need[x] for x in covers[b]):
                for x in covers[b]:
                    need[x] -= 1
                counts[b] += 1
                dfs()
                counts[b] -= 1
                if not counts[b]:
                    del counts[b]
                for x in covers[b]:
                    need[x] += 1

    dfs()
    return found


def dual_from_block_multiset(n: int, items) -> "BlockDesign":
    from uslsq.block_design import BlockDesign
    perms = list(itertools.permutations(range(n)))
    blocks = []
    for bi, mult in items:
        p = perms[bi]
        block = tuple(sorted(i * n + p[i] + 1 for i in range(n)))
        blocks.extend([block] * mult)
    return BlockDesign(v=n * n, blocks=tuple(blocks))


@pytest.fixture(scope="module")
def five_two():
    return classify_uniform(5, 2)


@pytest.mark.parametrize("n,mu", ORACLE_CASES)
def test_pipeline_matches_independent_enumeration(n, mu):
    solutions = enumerate_solutions(n, mu)
    result = classify_uniform(n, mu)
    # dedup the raw solutions through the graph canonizer, a separate route
    oracle_certs = {design_certificate(dual_from_block_multiset(n, s)).data
                    for s in solutions}
    pipeline_certs = {design_certificate(dual(rec.square)).data
                      for rec in result.classes}
    assert pipeline_certs == oracle_certs
    # orbit sizes under the row/column/transpose group must add up to the
    # number of labelled solutions
    group = 2 * factorial(n) ** 2
    assert sum(group // rec.aut_dual for rec in result.classes) \
        == len(solutions)


@pytest.mark.parametrize("n,mu", ORACLE_CASES)
def test_group_minimizer_oracle_agrees(n, mu):
    result = classify_uniform(n, mu)
    assert set(naive_classify(n, mu)) == {rec.pairs for rec in result.classes}


def test_known_small_counts():
    assert classify_uniform(3, 1).class_count == 1
    assert classify_uniform(3, 2).class_count == 1
    assert classify_uniform(4, 1).class_count == 1
    assert classify_uniform(6, 1).class_count == 0


def test_four_one_class_details():
    rec, = classify_uniform(4, 1).classes
    assert rec.eta == (18, 48, 0, 0, 0)
    assert rec.aut_dual == 576
    assert rec.aut_square == 576


def test_five_two_census(five_two):
    assert five_two.class_count == 10
    assert five_two.complete
    etas = [rec.eta for rec in five_two.classes]
    assert etas == sorted(etas)
    assert etas[0] == (160, 600, 0, 0, 0, 20)
    assert five_two.classes[0].aut_dual == 800
    assert five_two.classes[0].aut_square == 800 * 2 ** 20
    assert etas[1] == (224, 456, 64, 32, 0, 4)
    assert five_two.classes[1].aut_square == 1024
    assert five_two.classes[1].aut_dual == 64
    assert etas[2] == (240, 420, 80, 40, 0, 0)
    assert five_two.classes[2].aut_square == 160
    assert five_two.classes[2].aut_dual == 160


def test_class_records_are_internally_consistent(five_two):
    certs = [rec.certificate for rec in five_two.classes]
    assert len(set(certs)) == len(certs)
    for rec in five_two.classes:
        validate(rec.square.n, rec.square.k, rec.square.cells)
        report = uniformity(rec.square)
        assert report.uniform and report.mu == 2
        assert design_eta(underlying_design(rec.square)) == rec.eta
        # stabilizer times renaming freedom inside repeated blocks
        mult_part = 1
        for _b, m in rec.pairs:
            mult_part *= factorial(m)
        assert rec.aut_square == rec.aut_dual * mult_part
        bytes.fromhex(rec.certificate)  # well-formed hex


def test_worker_count_does_not_change_the_result(five_two):
    forked = classify_uniform(5, 2, workers=2)
    assert forked.class_count == five_two.class_count
    assert forked.solution_count == five_two.solution_count
    assert [rec.certificate for rec in forked.classes] \
        == [rec.certificate for rec in five_two.classes]
    assert [rec.pairs for rec in forked.classes] \
        == [rec.pairs for rec in five_two.classes]


def test_seed_sharding_unions_to_the_full_run(five_two):
    total = five_two.seed_count
    mid = total // 2
    low = classify_uniform(5, 2, seed_range=(0, mid))
    high = classify_uniform(5, 2, seed_range=(mid, total))
    assert not low.complete and not high.complete
    assert low.solution_count + high.solution_count \
        == five_two.solution_count
    union = {rec.certificate for rec in low.classes} \
        | {rec.certificate for rec in high.classes}
    assert union == {rec.certificate for rec in five_two.classes}


def test_seed_range_validation():
    with pytest.raises(ValueError):
        classify_uniform(3, 1, seed_range=(0, 10 ** 6))
    with pytest.raises(ValueError):
        classify_uniform(2, 1)
    with pytest.raises(ValueError):
        classify_uniform(3, 0)


def test_depth_policy_does_not_change_classes():
    base = classify_uniform(4, 1)
    deeper = classify_uniform(4, 1, depth_policy=6)
    assert [rec.certificate for rec in deeper.classes] \
        == [rec.certificate for rec in base.classes]


def test_checkpoint_resume(tmp_path):
    ck = str(tmp_path / "run.ckpt")
    first = classify_uniform(4, 1, checkpoint_path=ck)
    lines = open(ck).read().splitlines()
    assert json.loads(lines[0])["header"] == {
        "n": 4, "mu": 1, "seed_count": first.seed_count}
    assert len(lines) == first.seed_count + 1
    again = classify_uniform(4, 1, checkpoint_path=ck)
    assert [rec.certificate for rec in again.classes] \
        == [rec.certificate for rec in first.classes]
    assert again.solution_count == first.solution_count
    with pytest.raises(ValueError):
        classify_uniform(3, 2, checkpoint_path=ck)


def test_write_and_load_round_trip(tmp_path, five_two):
    out = str(tmp_path / "catalog")
    write_classification(five_two, out)
    manifest, index, records = load_classification(out, with_squares=True)
    assert manifest["class_count"] == 10
    assert manifest["complete"] is True
    assert [e["certificate"] for e in index["classes"]] \
        == [rec.certificate for rec in five_two.classes]
    assert len(records) == 10
    for entry, rec in zip(records, five_two.classes):
        assert tuple(entry["eta"]) == rec.eta
        assert entry["aut_square"] == rec.aut_square


def test_loading_a_shard_is_refused(tmp_path):
    shard = classify_uniform(4, 1, seed_range=(0, 3))
    out = str(tmp_path / "partial")
    write_classification(shard, out)
    with pytest.raises(IncompleteRunError):
        load_classification(out)
    with pytest.raises(IncompleteRunError):
        load_classification(str(tmp_path / "nowhere"))
