"""Self-reduction tests: blinding, correction, voting, mock oracle."""

import random

import pytest

from idak.bilinear import (
    GElem,
    gt_exp,
    hash_to_group,
    instance_generate,
    pairing,
    point_add,
    scalar_exp,
)
from idak.selfreduction import (
    Blinding,
    CbdhInstance,
    MockCbdhOracle,
    amplify,
    correct,
    make_instance,
    randomize,
    solve_dlog,
    validate_instance,
)

GP = instance_generate(4, "0")  # p=43, q=11
GEN = hash_to_group(GP, "reduction-generator")


def dlog(params, base, target):
    step = GElem(None, None)
    for k in range(params.q):
        if step == target:
            return k
        step = point_add(params, step, base)
    raise AssertionError("not in subgroup")


def truth_for(params, inst):
    x = dlog(params, inst.g, inst.x_point)
    y = dlog(params, inst.g, inst.y_point)
    z = dlog(params, inst.g, inst.z_point)
    base = pairing(params, inst.g, inst.g)
    return gt_exp(base, x * y * z % params.q)


# ---------------------------------------------------------------------------
# instances and blinding
# ---------------------------------------------------------------------------


def test_make_instance_answer_is_consistent():
    rng = random.Random(7)
    for _ in range(10):
        inst, claimed = make_instance(GP, GEN, rng)
        assert claimed == truth_for(GP, inst)


def test_make_instance_exponents_nonzero():
    rng = random.Random(1)
    for _ in range(50):
        inst, _ = make_instance(GP, GEN, rng)
        assert not inst.x_point.is_identity()
        assert not inst.y_point.is_identity()
        assert not inst.z_point.is_identity()


def test_validate_instance_rejects_bad_points():
    with pytest.raises(ValueError):
        validate_instance(GP, CbdhInstance(GElem(None, None), GEN, GEN, GEN))
    with pytest.raises(ValueError):
        validate_instance(GP, CbdhInstance(GEN, GElem(1, 1), GEN, GEN))
    # order-2 point (y == 0) lies on the curve but outside the subgroup
    rogue = GElem(0, 0)
    with pytest.raises(ValueError):
        validate_instance(GP, CbdhInstance(GEN, rogue, GEN, GEN))


def test_validate_instance_allows_identity_components():
    validate_instance(GP, CbdhInstance(GEN, GElem(None, None), GEN, GEN))


def test_randomize_shifts_exponents():
    rng = random.Random(11)
    inst, _ = make_instance(GP, GEN, rng)
    x = dlog(GP, GEN, inst.x_point)
    y = dlog(GP, GEN, inst.y_point)
    z = dlog(GP, GEN, inst.z_point)
    for _ in range(20):
        blinded, shift = randomize(GP, inst, rng)
        assert blinded.x_point == point_add(
            GP, inst.x_point, scalar_exp(GP, GEN, shift.a)
        )
        assert dlog(GP, GEN, blinded.x_point) == (x + shift.a) % GP.q
        assert dlog(GP, GEN, blinded.y_point) == (y + shift.b) % GP.q
        assert dlog(GP, GEN, blinded.z_point) == (z + shift.c) % GP.q


def test_randomize_hides_the_query():
    # blinded exponents should be uniform regardless of the instance
    rng = random.Random(3)
    inst, _ = make_instance(GP, GEN, rng)
    counts = [0] * GP.q
    draws = 2200
    for _ in range(draws):
        blinded, _ = randomize(GP, inst, rng)
        counts[dlog(GP, GEN, blinded.x_point)] += 1
    for count in counts:
        assert abs(count / draws - 1 / GP.q) < 0.03


# ---------------------------------------------------------------------------
# correction
# ---------------------------------------------------------------------------


def test_zero_blinding_is_a_noop():
    rng = random.Random(5)
    inst, truth = make_instance(GP, GEN, rng)
    assert correct(GP, truth, inst, Blinding(0, 0, 0)) == truth


def test_correct_recovers_truth_from_honest_answer():
    rng = random.Random(9)
    for _ in range(25):
        inst, truth = make_instance(GP, GEN, rng)
        blinded, shift = randomize(GP, inst, rng)
        honest = truth_for(GP, blinded)
        assert correct(GP, honest, inst, shift) == truth


def test_correct_maps_wrong_answers_to_wrong_results():
    # unblinding is a bijection on GT, so a wrong answer stays wrong
    rng = random.Random(13)
    inst, truth = make_instance(GP, GEN, rng)
    base = pairing(GP, GEN, GEN)
    for _ in range(60):
        blinded, shift = randomize(GP, inst, rng)
        honest = truth_for(GP, blinded)
        wrong = gt_exp(base, rng.randrange(GP.q))
        if wrong == honest:
            continue
        assert correct(GP, wrong, inst, shift) != truth


# ---------------------------------------------------------------------------
# voting
# ---------------------------------------------------------------------------


def test_amplify_with_perfect_oracle_single_round():
    rng = random.Random(17)
    inst, truth = make_instance(GP, GEN, rng)
    oracle = MockCbdhOracle(GP, GEN, 1.0, random.Random(0))
    assert amplify(GP, oracle, inst, 1, rng) == truth
    assert oracle.queries == 1


def test_amplify_is_deterministic_given_seeds():
    inst, _ = make_instance(GP, GEN, random.Random(19))
    first = amplify(
        GP, MockCbdhOracle(GP, GEN, 0.4, random.Random(1)), inst, 31, random.Random(2)
    )
    second = amplify(
        GP, MockCbdhOracle(GP, GEN, 0.4, random.Random(1)), inst, 31, random.Random(2)
    )
    assert first == second


def test_amplify_rescues_a_noisy_oracle():
    rng = random.Random(23)
    wins = {1: 0, 201: 0}
    trials = 30
    for trial in range(trials):
        inst, truth = make_instance(GP, GEN, rng)
        for rounds in wins:
            oracle = MockCbdhOracle(GP, GEN, 0.3, random.Random(trial * 1000 + rounds))
            if amplify(GP, oracle, inst, rounds, rng) == truth:
                wins[rounds] += 1
    assert wins[201] == trials  # voting washes the noise out
    assert wins[1] < trials  # a single query cannot


def test_amplify_has_no_power_against_a_useless_oracle():
    # delta=0 leaves only chance collisions, about 1/q per trial
    rng = random.Random(29)
    trials, hits = 60, 0
    for trial in range(trials):
        inst, truth = make_instance(GP, GEN, rng)
        oracle = MockCbdhOracle(GP, GEN, 0.0, random.Random(trial))
        if amplify(GP, oracle, inst, 51, rng) == truth:
            hits += 1
    assert hits / trials < 0.5


def test_amplify_rejects_nonpositive_rounds():
    inst, _ = make_instance(GP, GEN, random.Random(31))
    oracle = MockCbdhOracle(GP, GEN, 1.0, random.Random(0))
    with pytest.raises(ValueError):
        amplify(GP, oracle, inst, 0, random.Random(0))


# ---------------------------------------------------------------------------
# mock oracle internals
# ---------------------------------------------------------------------------


def test_solve_dlog_matches_brute_force():
    for k in range(GP.q):
        target = scalar_exp(GP, GEN, k)
        assert solve_dlog(GP, GEN, target) == k


def test_solve_dlog_on_larger_subgroup():
    params = instance_generate(16, "dlog")
    base = hash_to_group(params, "dlog-base")
    rng = random.Random(37)
    for _ in range(5):
        k = rng.randrange(params.q)
        assert solve_dlog(params, base, scalar_exp(params, base, k)) == k


def test_solve_dlog_rejects_foreign_points():
    rogue = GElem(0, 0)  # order 2, not a power of GEN
    with pytest.raises(ValueError):
        solve_dlog(GP, GEN, rogue)


def test_oracle_delta_validation():
    with pytest.raises(ValueError):
        MockCbdhOracle(GP, GEN, 1.5, random.Random(0))
    with pytest.raises(ValueError):
        MockCbdhOracle(GP, GEN, -0.1, random.Random(0))


def test_oracle_accuracy_tracks_delta():
    rng = random.Random(41)
    oracle = MockCbdhOracle(GP, GEN, 0.7, random.Random(6))
    trials, hits = 400, 0
    for _ in range(trials):
        inst, _ = make_instance(GP, GEN, rng)
        blinded, _ = randomize(GP, inst, rng)
        if oracle(blinded) == truth_for(GP, blinded):
            hits += 1
    # wrong answers still collide with the truth 1/q of the time
    expected = 0.7 + 0.3 / GP.q
    assert abs(hits / trials - expected) < 0.06
    assert oracle.queries == trials
