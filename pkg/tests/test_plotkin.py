"""Doubled matrix codes: assembly, duality, decoding, fold statistics."""

import pytest

from rankfold import DecodingFailure, SplitMix64
from rankfold.errors import ParameterMismatch
from rankfold.gabidulin import GabidulinCode, GabidulinMatrixCode
from rankfold.gf import ExtField, PrimeField
from rankfold.linalg import ExactMatrix, random_rank_matrix
from rankfold.plotkin import (
    FoldStats,
    PlotkinCode,
    fold_probability_experiment,
    gabidulin_plotkin,
    non_mrd_witness,
    plotkin_dim,
    plotkin_dual_check,
    plotkin_encode,
    plotkin_encode_char2,
    plotkin_fold,
)

GF5 = PrimeField(5)
GF23 = PrimeField(23)


def eye(field, n):
    return ExactMatrix.identity(field, n)


def zeros(field, n):
    return ExactMatrix.zeros(field, n, n)


def rand_mat(field, rng, rows, cols):
    return ExactMatrix(
        field, [[field.random_element(rng) for _ in range(cols)] for _ in range(rows)]
    )


# -- encoders --------------------------------------------------------------------


def test_encode_frozen_examples():
    I, Z = eye(GF5, 2), zeros(GF5, 2)
    assert plotkin_encode(2, I, Z, Z, Z) == ExactMatrix.block([[I, Z], [Z, I]])
    assert plotkin_encode(2, Z, Z, I, Z) == ExactMatrix.block([[I, Z], [Z, I.scale(-1)]])
    assert plotkin_encode(2, Z, Z, Z, Z).is_zero()


def test_encode_char2_frozen_examples():
    gf2 = PrimeField(2)
    I, Z = eye(gf2, 2), zeros(gf2, 2)
    assert plotkin_encode_char2(1, Z, Z, Z, Z).is_zero()
    assert plotkin_encode_char2(1, I, Z, Z, Z) == ExactMatrix.block([[I, Z], [Z, I]])
    assert plotkin_encode_char2(1, Z, Z, I, Z) == ExactMatrix.block([[I, I], [Z, I]])
    with pytest.raises(Exception):
        plotkin_encode_char2(2, eye(GF5, 2), zeros(GF5, 2), zeros(GF5, 2), zeros(GF5, 2))


def test_encode_block_recovery():
    """The assembly is injective: blocks come back from the quadrants."""
    rng = SplitMix64(1)
    a = GF5.element(2)
    inv2 = GF5.element(2).inverse()
    for _ in range(10):
        A0, A1, B0, B1 = (rand_mat(GF5, rng, 2, 3) for _ in range(4))
        Y = plotkin_encode(a, A0, A1, B0, B1)
        tl, tr, bl, br = Y.split_blocks(2, 3)
        assert (tl + br).scale(inv2) == A0
        assert (tl - br).scale(inv2) == B0
        assert (tr.scale(a.inverse()) + bl).scale(inv2) == A1
        assert (bl - tr.scale(a.inverse())).scale(inv2) == B1


# -- dimension and duality --------------------------------------------------------


def test_dim_formula_and_spanning_rank():
    code = gabidulin_plotkin(5, 4, 3, 2)
    assert plotkin_dim(code) == 2 * (4 * 3 + 4 * 2) == 40
    gens = code.basis_codewords()
    assert len(gens) == 40
    flat = ExactMatrix(
        GF5,
        [[B.entries[i][j] for i in range(8) for j in range(8)] for B in gens],
    )
    assert flat.rank() == 40


def test_dim_degenerate_cases():
    F54 = ExtField(5, 4)
    zero_c = GabidulinMatrixCode(GabidulinCode(F54, 0))
    assert PlotkinCode(zero_c, zero_c, 1).dim == 0


def test_duality_random_instances():
    rng = SplitMix64(2)
    for q in (5, 7):
        field = PrimeField(q)
        for trial in range(10):
            c_gens = [rand_mat(field, rng, 2, 2) for _ in range(rng.randint(1, 3))]
            d_gens = [rand_mat(field, rng, 2, 2) for _ in range(rng.randint(1, 3))]
            a = field.element(rng.randint(1, q - 1))
            assert plotkin_dual_check(c_gens, d_gens, a, field, 2, 2)


def test_duality_extreme_codes():
    full = [
        ExactMatrix(GF5, [[1 if (i, j) == (r, c) else 0 for j in range(2)] for i in range(2)])
        for r in range(2)
        for c in range(2)
    ]
    assert plotkin_dual_check(full, full, 2, GF5, 2, 2)
    assert plotkin_dual_check([], [], 2, GF5, 2, 2)


# -- folding -----------------------------------------------------------------------


def test_fold_kills_a_blocks():
    rng = SplitMix64(3)
    a = GF5.element(4)  # square: 4 = 2^2
    sqrt_a = GF5.sqrt(a)
    Z = zeros(GF5, 3)
    for sign in (+1, -1):
        for _ in range(5):
            A0, A1 = rand_mat(GF5, rng, 3, 3), rand_mat(GF5, rng, 3, 3)
            Y = plotkin_encode(a, A0, A1, Z, Z)
            assert plotkin_fold(Y, a, sign, sqrt_a, GF5).is_zero()


def test_fold_b_blocks_identities():
    a = GF23.element(9)
    sqrt_a = GF23.sqrt(a)
    assert sqrt_a == GF23.element(3)
    I, Z = eye(GF23, 3), zeros(GF23, 3)
    Y0 = plotkin_encode(a, Z, Z, I, Z)
    two_over_sqrt = GF23.element(2) / sqrt_a
    assert plotkin_fold(Y0, a, +1, sqrt_a, GF23) == I.scale(two_over_sqrt)
    assert plotkin_fold(Y0, a, -1, sqrt_a, GF23) == I.scale(-two_over_sqrt)
    # the B1 block folds sign-independently to 2I
    Y1 = plotkin_encode(a, Z, Z, Z, I)
    assert plotkin_fold(Y1, a, +1, sqrt_a, GF23) == I.scale(2)
    assert plotkin_fold(Y1, a, -1, sqrt_a, GF23) == I.scale(2)


def test_fold_never_gains_rank():
    rng = SplitMix64(4)
    a = GF5.element(4)
    sqrt_a = GF5.sqrt(a)
    for _ in range(500):
        t = rng.randint(0, 4)
        E = random_rank_matrix(GF5, rng, 4, 4, t)
        folded = plotkin_fold(E, a, +1, sqrt_a, GF5)
        assert folded.rank() <= t


# -- decoding: square twist ---------------------------------------------------------


def test_decode_error_free():
    rng = SplitMix64(5)
    code = gabidulin_plotkin(5, 4, 3, 2)
    C = code.random_codeword(rng)
    C_hat, E_hat = code.decode(C)
    assert C_hat == C and E_hat.is_zero()


def test_decode_roundtrip_small():
    rng = SplitMix64(6)
    code = gabidulin_plotkin(5, 4, 3, 2)
    recovered = 0
    for _ in range(20):
        C = code.random_codeword(rng)
        E = random_rank_matrix(GF5, rng, 8, 8, 1)
        try:
            C_hat, E_hat = code.decode(C + E)
        except DecodingFailure:
            continue
        assert C_hat == C and E_hat == E
        recovered += 1
    # fold-drop failures are ~0.7% per trial here; most must round-trip
    assert recovered >= 17


def test_decode_roundtrip_reference_params():
    rng = SplitMix64(7)
    code = gabidulin_plotkin(23, 8, 6, 4)
    assert code.radius == 2 and code.dim == 160
    for _ in range(3):
        C = code.random_codeword(rng)
        E = random_rank_matrix(GF23, rng, 16, 16, 2)
        C_hat, E_hat = code.decode(C + E)
        assert C_hat == C and E_hat == E


def test_decode_never_silently_wrong():
    """An error built to make the first fold collapse forces an explicit
    failure: the erasure stage sees an empty support while the true
    bottom-half error has rank 1, which no codeword can absorb."""
    rng = SplitMix64(8)
    code = gabidulin_plotkin(5, 4, 3, 2)
    b = GF5.sqrt(code.a).inverse()
    M = random_rank_matrix(GF5, rng, 4, 4, 1)
    Z = zeros(GF5, 4)
    E = ExactMatrix.block([[M, Z], [M.scale(-b), Z]])
    assert E.rank() == 1 <= code.radius
    assert plotkin_fold(E, code.a, +1, GF5.sqrt(code.a), GF5).is_zero()
    C = code.random_codeword(rng)
    with pytest.raises(DecodingFailure):
        code.decode(C + E)


def test_decode_rejects_wrong_shape():
    code = gabidulin_plotkin(5, 4, 3, 2)
    with pytest.raises(Exception):
        code.decode(zeros(GF5, 4))


# -- decoding: non-square twist ------------------------------------------------------


def test_decode_roundtrip_nonsquare():
    rng = SplitMix64(9)
    F58 = ExtField(5, 8)
    C = GabidulinMatrixCode(GabidulinCode(F58, 6))
    D = GabidulinMatrixCode(GabidulinCode(F58, 2))
    code = PlotkinCode(C, D, 2, radius=1)  # 2 is not a square mod 5
    assert not GF5.is_square(code.a)
    for _ in range(3):
        W = code.random_codeword(rng)
        E = random_rank_matrix(GF5, rng, 16, 16, 1)
        C_hat, E_hat = code.decode(W + E)
        assert C_hat == W and E_hat == E


def test_decode_nonsquare_error_free():
    rng = SplitMix64(10)
    F58 = ExtField(5, 8)
    code = PlotkinCode(
        GabidulinMatrixCode(GabidulinCode(F58, 6)),
        GabidulinMatrixCode(GabidulinCode(F58, 2)),
        2,
        radius=1,
    )
    W = code.random_codeword(rng)
    C_hat, E_hat = code.decode(W)
    assert C_hat == W and E_hat.is_zero()


# -- construction constraints ----------------------------------------------------------


def test_gabidulin_plotkin_parameter_guard():
    with pytest.raises(ParameterMismatch):
        gabidulin_plotkin(5, 8, 6, 2)  # 2*6 - 2 = 10 != 8
    with pytest.raises(ParameterMismatch):
        gabidulin_plotkin(5, 4, 3, 2, a=0)


def test_degenerate_zero_radius():
    # t = 0 forces k1 = k2 = m, where the doubled code fills the ambient
    # space; decoding is the trivial membership test that accepts anything
    rng = SplitMix64(11)
    code = gabidulin_plotkin(5, 3, 3, 3)
    assert code.radius == 0 and code.dim == 36 == code.rows * code.cols
    C = code.random_codeword(rng)
    C_hat, E_hat = code.decode(C)
    assert C_hat == C and E_hat.is_zero()
    E = random_rank_matrix(GF5, rng, 6, 6, 1)
    C_hat, E_hat = code.decode(C + E)
    assert C_hat == C + E and E_hat.is_zero()


def test_non_mrd_witness():
    code = gabidulin_plotkin(23, 8, 6, 4)
    w, mrd = non_mrd_witness(code)
    assert mrd == 2 * 8 - (6 + 4) + 1 == 7
    assert w.rank() == 2 * (8 - 6 + 1) == 6
    assert w.rank() < mrd
    # and the witness is a codeword: decoding it with no noise returns it
    C_hat, E_hat = code.decode(w)
    assert C_hat == w and E_hat.is_zero()


# -- fold statistics ---------------------------------------------------------------------


def test_fold_stats_zero_rank_never_drops():
    st = fold_probability_experiment(5, 4, 0, 1, 300, 3)
    assert st.drops == 0 and st.rate == 0.0
    assert st.ci95()[0] == 0.0


def test_fold_stats_deterministic():
    a = fold_probability_experiment(5, 4, 1, 1, 5000, 42)
    b = fold_probability_experiment(5, 4, 1, 1, 5000, 42)
    assert a == b
    c = fold_probability_experiment(5, 4, 1, 1, 5000, 43)
    assert (a.q, a.m, a.t) == (c.q, c.m, c.t)


def test_fold_stats_consistent_with_bound():
    st = fold_probability_experiment(5, 4, 1, 1, 20000, 12)
    lo, hi = st.ci95()
    assert lo <= st.rate <= hi
    assert hi <= 10 * st.paper_bound
    assert st.to_json()["ci95"] == [lo, hi]
    assert st.to_json()["paper_bound"] == 5.0 ** (1 - 4 - 1)


def test_fold_stats_nonsquare_bound():
    st = fold_probability_experiment(5, 4, 1, 2, 20000, 13)
    assert not st.square
    assert st.paper_bound == 5.0 ** (2 * 1 - 2 * 4 - 2)
    assert st.ci95()[1] <= 100 * st.paper_bound


def test_fold_stats_matches_exact_recount():
    """Recompute one small batch with exact arithmetic."""
    rng = SplitMix64(21)
    a = GF5.element(4)
    sqrt_a = GF5.sqrt(a)
    drops = 0
    trials = 400
    for _ in range(trials):
        E = random_rank_matrix(GF5, rng, 8, 8, 1)
        if plotkin_fold(E, a, +1, sqrt_a, GF5).rank() < 1:
            drops += 1
    st = FoldStats(q=5, m=4, t=1, a=4, square=True, trials=trials, drops=drops)
    assert 0 <= st.rate < 0.05
    lo, hi = st.ci95()
    assert 0 <= lo <= st.rate <= hi <= 1
