"""Gabidulin codes: linearized polynomials, decoding, matrix views."""

import pytest

from rankfold import DecodingFailure, SplitMix64
from rankfold.gabidulin import (
    GabidulinCode,
    GabidulinMatrixCode,
    LinearizedPoly,
    annihilator,
)
from rankfold.gf import (
    ExtField,
    PrimeField,
    QuadExtField,
    expand_to_base,
    reconstruct_from_base,
)
from rankfold.linalg import ExactMatrix

F238 = ExtField(23, 8)
F53 = ExtField(5, 3)


def rank_error(field, rng, t, rows, cols):
    """Random matrix of rank exactly t over a finite field."""
    p = field.p

    def rand():
        return field.element(rng.randint(0, p - 1))

    while True:
        X = ExactMatrix(field, [[rand() for _ in range(t)] for _ in range(rows)])
        Z = ExactMatrix(field, [[rand() for _ in range(cols)] for _ in range(t)])
        E = X @ Z
        if E.rank() == t:
            return E


def vector_error(code, rng, t):
    """Length-n error over GF(q^m) whose expansion has rank exactly t."""
    E = rank_error(code.field.base, rng, t, code.field.m, code.n)
    return reconstruct_from_base(code.field, E), E


def add(y, e):
    return [a + b for a, b in zip(y, e)]


# -- linearized polynomials ----------------------------------------------------


def test_poly_evaluation_is_base_linear():
    rng = SplitMix64(1)
    f = LinearizedPoly(F53, [F53.random_element(rng) for _ in range(3)])
    for _ in range(20):
        x = F53.random_element(rng)
        y = F53.random_element(rng)
        lam = rng.randint(0, 4)
        assert f(x + y) == f(x) + f(y)
        assert f(x * lam) == f(x) * lam


def test_poly_compose_matches_pointwise():
    rng = SplitMix64(2)
    f = LinearizedPoly(F53, [F53.random_element(rng) for _ in range(3)])
    g = LinearizedPoly(F53, [F53.random_element(rng) for _ in range(2)])
    h = f.compose(g)
    assert h.qdegree <= f.qdegree + g.qdegree
    for _ in range(20):
        x = F53.random_element(rng)
        assert h(x) == f(g(x))


def test_left_divide_inverts_compose():
    rng = SplitMix64(3)
    for _ in range(10):
        V = LinearizedPoly(F238, [F238.random_element(rng) for _ in range(3)])
        f = LinearizedPoly(F238, [F238.random_element(rng) for _ in range(4)])
        if V.qdegree < 0 or f.qdegree < 0:
            continue
        N = V.compose(f)
        assert N.left_divide(V) == f


def test_left_divide_rejects_inexact():
    N = LinearizedPoly(F53, [F53.zero, F53.zero, F53.one])
    with pytest.raises(ValueError):
        LinearizedPoly(F53, [F53.one, F53.one, F53.one]).left_divide(
            LinearizedPoly(F53, [F53.zero, F53.one])
        )
    with pytest.raises(ZeroDivisionError):
        N.left_divide(LinearizedPoly(F53, ()))


def test_annihilator_kernel_is_exact():
    rng = SplitMix64(4)
    basis = F238.polynomial_basis()
    A = annihilator(F238, basis[:3])
    assert A.qdegree == 3
    # vanishes on the whole span
    for _ in range(20):
        v = sum(
            (b * rng.randint(0, 22) for b in basis[:3]),
            F238.zero,
        )
        assert not A(v)
    # and nowhere else: the kernel has size q^3, so a point with a nonzero
    # coordinate outside the span must survive
    for b in basis[3:]:
        assert A(b)


def test_annihilator_skips_dependent_vectors():
    basis = F238.polynomial_basis()
    A = annihilator(F238, [basis[0], basis[1], basis[0] + basis[1]])
    assert A.qdegree == 2


# -- code construction and encoding --------------------------------------------


def test_code_parameters():
    code = GabidulinCode(F238, 4)
    assert (code.n, code.k, code.d, code.radius) == (8, 4, 5, 2)
    assert code.points == tuple(F238.polynomial_basis())


def test_dependent_points_rejected():
    basis = F238.polynomial_basis()
    with pytest.raises(ValueError):
        GabidulinCode(F238, 2, points=[basis[0], basis[1], basis[0] + basis[1]])


def test_encode_known_polynomials():
    code = GabidulinCode(F53, 2)
    zero = code.encode([F53.zero, F53.zero])
    assert all(not v for v in zero)
    # f = x evaluates to the points themselves
    assert code.encode([F53.one, F53.zero]) == list(code.points)
    # f = x^q is an invertible base-linear map, so the codeword has full rank
    frob = code.encode([F53.zero, F53.one])
    assert frob == [F53.frobenius(g) for g in code.points]
    assert expand_to_base(F53, frob).rank() == 3


def test_encode_is_linear():
    rng = SplitMix64(5)
    code = GabidulinCode(F53, 2)
    a = code.random_message(rng)
    b = code.random_message(rng)
    lam = F53.random_element(rng)
    ca, cb = code.encode(a), code.encode(b)
    combo = code.encode([x * lam + y for x, y in zip(a, b)])
    assert combo == [x * lam + y for x, y in zip(ca, cb)]


def test_random_codewords_reach_minimum_rank():
    rng = SplitMix64(6)
    code = GabidulinCode(F53, 2)
    for _ in range(200):
        msg = code.random_message(rng)
        if all(not v for v in msg):
            continue
        rank = expand_to_base(F53, code.encode(msg)).rank()
        assert rank >= code.d


def test_minimum_rank_codeword():
    for field, k in ((F238, 4), (F238, 6), (F53, 2)):
        code = GabidulinCode(field, k)
        w = code.minimum_rank_codeword()
        assert expand_to_base(field, w).rank() == code.d


def test_parity_check_annihilates_code():
    rng = SplitMix64(7)
    code = GabidulinCode(F238, 6)
    H = code.parity_check_matrix()
    assert H.rows == code.n - code.k
    assert H.rank() == code.n - code.k
    for _ in range(5):
        c = code.encode(code.random_message(rng))
        assert all(
            not sum((h * v for h, v in zip(row, c)), F238.zero)
            for row in H.rows_list()
        )


# -- error decoding -------------------------------------------------------------


def test_decode_error_free():
    rng = SplitMix64(8)
    code = GabidulinCode(F238, 4)
    c = code.encode(code.random_message(rng))
    chat, ehat = code.decode_errors(c)
    assert chat == c and all(not v for v in ehat)


def test_decode_roundtrip_half_distance():
    rng = SplitMix64(9)
    for k in (4, 6):
        code = GabidulinCode(F238, k)
        for _ in range(5):
            c = code.encode(code.random_message(rng))
            e, _ = vector_error(code, rng, code.radius)
            chat, ehat = code.decode_errors(add(c, e))
            assert chat == c
            assert ehat == e


def test_decode_never_lies_beyond_radius():
    rng = SplitMix64(10)
    code = GabidulinCode(F238, 4)
    for _ in range(5):
        c = code.encode(code.random_message(rng))
        e, _ = vector_error(code, rng, code.n - code.k)
        y = add(c, e)
        try:
            chat, ehat = code.decode_errors(y)
        except DecodingFailure:
            continue
        # any answer must still be a codeword within the claimed radius
        diff = [a - b for a, b in zip(y, chat)]
        assert expand_to_base(F238, diff).rank() <= code.radius


def test_interpolation_pair_consistency():
    rng = SplitMix64(11)
    code = GabidulinCode(F238, 4)
    c = code.encode(code.random_message(rng))
    e, _ = vector_error(code, rng, 2)
    y = add(c, e)
    V, N = code._interpolate(y, 2)
    assert V.qdegree >= 0
    for gi, yi in zip(code.points, y):
        assert V(yi) == N(gi)


# -- erasure decoding ------------------------------------------------------------


def test_erasure_decode_up_to_d_minus_one():
    rng = SplitMix64(12)
    code = GabidulinCode(F238, 4)
    for t in (1, code.n - code.k):
        c = code.encode(code.random_message(rng))
        e, E = vector_error(code, rng, t)
        chat = code.decode_erasures(add(c, e), E.row_space_basis())
        assert chat == c


def test_erasure_decode_empty_support():
    rng = SplitMix64(13)
    code = GabidulinCode(F238, 4)
    c = code.encode(code.random_message(rng))
    empty = ExactMatrix(PrimeField(23), ())
    assert code.decode_erasures(c, empty) == c
    noisy = list(c)
    noisy[0] = noisy[0] + F238.one
    with pytest.raises(DecodingFailure):
        code.decode_erasures(noisy, empty)


def test_erasure_support_containing_codeword_fails():
    rng = SplitMix64(14)
    code = GabidulinCode(F238, 4)
    w = code.minimum_rank_codeword()
    support = expand_to_base(F238, w).row_space_basis()
    assert support.rows == code.d
    c = code.encode(code.random_message(rng))
    e, _ = vector_error(code, rng, 1)
    with pytest.raises(DecodingFailure):
        code.decode_erasures(add(c, e), support)


# -- matrix view ------------------------------------------------------------------


def test_matrix_code_roundtrip():
    rng = SplitMix64(15)
    code = GabidulinCode(F238, 4)
    mc = GabidulinMatrixCode(code)
    assert (mc.rows, mc.cols, mc.dim) == (8, 8, 32)
    Y = mc.random_codeword(rng)
    E = rank_error(PrimeField(23), rng, 2, 8, 8)
    C, Ehat = mc.decode(Y + E)
    assert C == Y and Ehat == E
    assert mc.decode_erasures(Y + E, E.row_space_basis()) == Y


def test_matrix_basis_codewords_span():
    code = GabidulinCode(F53, 2)
    mc = GabidulinMatrixCode(code)
    gens = mc.basis_codewords()
    assert len(gens) == mc.dim
    flat = ExactMatrix(
        PrimeField(5),
        [[B.entries[i][j] for i in range(mc.rows) for j in range(mc.cols)] for B in gens],
    )
    assert flat.rank() == mc.dim


def test_matrix_code_custom_basis():
    rng = SplitMix64(16)
    code = GabidulinCode(F53, 2)
    basis = [b * 2 for b in F53.polynomial_basis()]
    mc = GabidulinMatrixCode(code, basis=basis)
    msg = code.random_message(rng)
    Y = mc.encode(msg)
    assert mc.to_vector(Y) == code.encode(msg)


# -- quadratic-extension decoders --------------------------------------------------


def embed_ext(M, ext):
    return M.map_entries(lambda e: ext.coerce(e.val), ext)


def ext_codeword(mc, ext, rng):
    A = embed_ext(mc.random_codeword(rng), ext)
    B = embed_ext(mc.random_codeword(rng), ext)
    return A + B.scale(ext.sqrt_nonresidue)


def test_ext_decode_within_half_radius():
    rng = SplitMix64(17)
    ext = QuadExtField(PrimeField(23))
    mc = GabidulinMatrixCode(GabidulinCode(F238, 4))
    for _ in range(3):
        C = ext_codeword(mc, ext, rng)
        E = rank_error(ext, rng, 1, 8, 8)
        assert mc.decode_ext(C + E, 1) == C


def test_ext_decode_rejects_wrong_component():
    rng = SplitMix64(18)
    ext = QuadExtField(PrimeField(23))
    mc = GabidulinMatrixCode(GabidulinCode(F238, 4))
    C = ext_codeword(mc, ext, rng)
    # rank 3 over the extension: components can reach rank 6 > radius 2
    E = rank_error(ext, rng, 3, 8, 8)
    with pytest.raises(DecodingFailure):
        mc.decode_ext(C + E, 1)


def test_ext_erasure_roundtrip():
    rng = SplitMix64(19)
    ext = QuadExtField(PrimeField(23))
    mc = GabidulinMatrixCode(GabidulinCode(F238, 4))
    C = ext_codeword(mc, ext, rng)
    E = rank_error(ext, rng, 2, 8, 8)
    assert mc.decode_erasures_ext(C + E, E.row_space_basis()) == C


def test_ext_erasure_ambiguous_support_fails():
    rng = SplitMix64(20)
    ext = QuadExtField(PrimeField(23))
    code = GabidulinCode(F238, 4)
    mc = GabidulinMatrixCode(code)
    W = embed_ext(expand_to_base(F238, code.minimum_rank_codeword()), ext)
    support = W.row_space_basis()
    C = ext_codeword(mc, ext, rng)
    E = rank_error(ext, rng, 1, 8, 8)
    with pytest.raises(DecodingFailure):
        mc.decode_erasures_ext(C + E.scale(0), support.vstack(E.row_space_basis()))


# -- serialization -----------------------------------------------------------------


def test_descriptor_roundtrip():
    code = GabidulinCode(F238, 4)
    data = code.to_json()
    assert data["q"] == 23 and data["m"] == 8 and data["k"] == 4
    assert len(data["g"]) == 8
    points = [F238.element_from_json(g) for g in data["g"]]
    assert points == list(code.points)
