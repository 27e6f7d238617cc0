"""Doubling construction for rank-metric codes over GF(q), q odd.

Two m x n matrix codes C and D and a nonzero scalar a combine into a
2m x 2n code whose words are

    [[A0 + B0, a(A1 - B1)],
     [A1 + B1, A0 - B0]]       A0, A1 in C,  B0, B1 in D.

Multiplying by (s/sqrt(a) I | I) on the left and (I ; -s/sqrt(a) I) on
the right kills the A-blocks and maps a codeword to (2s/sqrt(a)) B0 +
2 B1, turning one decoding problem in the doubled space into error
decoding in D followed by erasure decoding in C.  When a is a square the
two sign choices stay over GF(q); otherwise a single fold works over
GF(q^2).  The folded error keeps the original rank for all but a
q^(t-m-1) fraction of rank-t errors (q^(2t-2m-2) over the extension),
which the Monte Carlo harness at the bottom measures.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.stats import beta as beta_dist

from .errors import DecodingFailure, DimensionMismatch, NotASquare, ParameterMismatch
from .gabidulin import GabidulinCode, GabidulinMatrixCode
from .gf import ExtField, PrimeField, QuadExtField
from .linalg import ExactMatrix
from .modmat import batch_rank_mod, batch_rank_quad, sample_rank_exact
from .rng import derive_seed


def _check_block(M: ExactMatrix, rows: int, cols: int, name: str):
    if M.shape != (rows, cols):
        raise DimensionMismatch(f"{name} must be {rows}x{cols}, got {M.shape}")


def plotkin_encode(a, A0: ExactMatrix, A1: ExactMatrix, B0: ExactMatrix, B1: ExactMatrix) -> ExactMatrix:
    """Assemble the 2m x 2n block codeword from component words."""
    rows, cols = A0.shape
    for name, M in (("A1", A1), ("B0", B0), ("B1", B1)):
        _check_block(M, rows, cols, name)
    return ExactMatrix.block(
        [
            [A0 + B0, (A1 - B1).scale(a)],
            [A1 + B1, A0 - B0],
        ]
    )


def plotkin_encode_char2(a, A0: ExactMatrix, A1: ExactMatrix, B0: ExactMatrix, B1: ExactMatrix) -> ExactMatrix:
    """Characteristic-2 variant of the assembly (encoder only; the
    decoders in this module require odd q)."""
    if A0.field.p != 2:
        raise DimensionMismatch("this assembly is for characteristic 2")
    rows, cols = A0.shape
    for name, M in (("A1", A1), ("B0", B0), ("B1", B1)):
        _check_block(M, rows, cols, name)
    return ExactMatrix.block(
        [
            [A0 + B0, (A1 + B1).scale(a) + B0],
            [A1 + B1, A0 + A1 + B0],
        ]
    )


def plotkin_fold(Y: ExactMatrix, a, sign: int, sqrt_a, field) -> ExactMatrix:
    """(s b I | I) Y (I ; -s b I) with b = 1/sqrt(a), over the given field.

    On a codeword this equals (2s/sqrt(a)) B0 + 2 B1; on an error it is a
    two-sided linear combination, so the result never gains rank.
    """
    rows, cols = Y.shape
    if rows % 2 or cols % 2:
        raise DimensionMismatch("foldable matrices have even dimensions")
    if Y.field != field:
        Y = Y.map_entries(field.coerce, field)
    b = field.coerce(sqrt_a).inverse()
    if sign < 0:
        b = -b
    tl, tr, bl, br = Y.split_blocks(rows // 2, cols // 2)
    inv_a = field.coerce(a).inverse()
    return (tl - br).scale(b) + bl - tr.scale(inv_a)


def plotkin_dim(code: "PlotkinCode") -> int:
    return 2 * (code.C.dim + code.D.dim)


def _flatten(mats, field) -> ExactMatrix:
    rows = [
        [M.entries[i][j] for i in range(M.rows) for j in range(M.cols)]
        for M in mats
    ]
    return ExactMatrix(field, rows)


def _dual_basis(gens, field, rows, cols) -> list[ExactMatrix]:
    """All matrices with zero trace pairing Tr(M G^T) against every
    generator; the pairing is the entrywise dot product on vectorizations."""
    if not gens:
        out = []
        for i in range(rows):
            for j in range(cols):
                M = [[field.zero] * cols for _ in range(rows)]
                M[i][j] = field.one
                out.append(ExactMatrix(field, M))
        return out
    flat = _flatten(gens, field)
    out = []
    for vec in flat.kernel_basis():
        out.append(ExactMatrix(field, [list(vec[i * cols : (i + 1) * cols]) for i in range(rows)]))
    return out


def _doubled_span(c_gens, d_gens, a, field, rows, cols) -> list[ExactMatrix]:
    zero = ExactMatrix.zeros(field, rows, cols)
    out = []
    for G in c_gens:
        out.append(plotkin_encode(a, G, zero, zero, zero))
        out.append(plotkin_encode(a, zero, G, zero, zero))
    for H in d_gens:
        out.append(plotkin_encode(a, zero, zero, H, zero))
        out.append(plotkin_encode(a, zero, zero, zero, H))
    return out


def plotkin_dual_check(c_gens, d_gens, a, field, rows, cols) -> bool:
    """Whether the dual of the doubled code built from (C, D, a) equals the
    doubled code built from (C dual, D dual, 1/a), as exact subspaces of
    the 2m x 2n ambient under the trace pairing."""
    a = field.coerce(a)
    lhs_dual = _dual_basis(_doubled_span(c_gens, d_gens, a, field, rows, cols), field, 2 * rows, 2 * cols)
    rhs = _doubled_span(
        _dual_basis(c_gens, field, rows, cols),
        _dual_basis(d_gens, field, rows, cols),
        a.inverse(),
        field,
        rows,
        cols,
    )
    L = _flatten(lhs_dual, field) if lhs_dual else ExactMatrix(field, ())
    R = _flatten(rhs, field) if rhs else ExactMatrix(field, ())
    if L.rows == 0 or R.rows == 0:
        return L.rows == R.rows
    rl, rr = L.rank(), R.rank()
    return rl == rr and L.vstack(R).rank() == rl


class PlotkinCode:
    """Doubled code with a working decoder.

    C and D are matrix-code handles over the same prime field and shape;
    D must decode errors and C erasures (plus their quadratic-extension
    counterparts when a is not a square).  `radius` is the error rank the
    pair of component decoders supports.
    """

    def __init__(self, C, D, a, radius: int = 0):
        if (C.rows, C.cols) != (D.rows, D.cols):
            raise DimensionMismatch("component codes must share their shape")
        if C.base != D.base:
            raise DimensionMismatch("component codes must share their field")
        self.C = C
        self.D = D
        self.field = C.base
        if self.field.p == 2:
            raise ParameterMismatch("decoding needs odd characteristic")
        self.a = self.field.coerce(a)
        if not self.a:
            raise ParameterMismatch("the twist scalar must be nonzero")
        self.rows = 2 * C.rows
        self.cols = 2 * C.cols
        self.dim = 2 * (C.dim + D.dim)
        self.radius = radius

    def encode(self, A0, A1, B0, B1) -> ExactMatrix:
        for name, M in (("A0", A0), ("A1", A1)):
            _check_block(M, self.C.rows, self.C.cols, name)
        for name, M in (("B0", B0), ("B1", B1)):
            _check_block(M, self.D.rows, self.D.cols, name)
        return plotkin_encode(self.a, A0, A1, B0, B1)

    def random_codeword(self, rng) -> ExactMatrix:
        return self.encode(
            self.C.random_codeword(rng),
            self.C.random_codeword(rng),
            self.D.random_codeword(rng),
            self.D.random_codeword(rng),
        )

    def basis_codewords(self) -> list[ExactMatrix]:
        zero = ExactMatrix.zeros(self.field, self.C.rows, self.C.cols)
        out = []
        for G in self.C.basis_codewords():
            out.append(self.encode(G, zero, zero, zero))
            out.append(self.encode(zero, G, zero, zero))
        for H in self.D.basis_codewords():
            out.append(self.encode(zero, zero, H, zero))
            out.append(self.encode(zero, zero, zero, H))
        return out

    def decode(self, Y: ExactMatrix, t: int = None) -> tuple[ExactMatrix, ExactMatrix]:
        """Recover (codeword, error) from Y = codeword + rank-t error.

        Square a stays over GF(q) with two fold/decode passes; non-square
        a uses one pass over GF(q^2).  Either way the answer is verified
        against Y before being returned, so a wrong silent answer is
        impossible; anything else raises DecodingFailure.
        """
        if Y.shape != (self.rows, self.cols):
            raise DimensionMismatch(f"expected a {self.rows}x{self.cols} matrix")
        if t is None:
            t = self.radius
        try:
            sqrt_a = self.field.sqrt(self.a)
        except NotASquare:
            C_hat = self._decode_nonsquare(Y, t)
        else:
            C_hat = self._decode_square(Y, t, sqrt_a)
        E_hat = Y - C_hat
        if E_hat.rank() > t:
            raise DecodingFailure("residual rank exceeds the decoding radius")
        return C_hat, E_hat

    def _decode_square(self, Y, t, sqrt_a) -> ExactMatrix:
        field = self.field
        half = field.element(2).inverse()
        quarter = half * half
        W1 = plotkin_fold(Y, self.a, +1, sqrt_a, field)
        W2 = plotkin_fold(Y, self.a, -1, sqrt_a, field)
        W1_hat, F1 = self.D.decode(W1, t)
        W2_hat, F2 = self.D.decode(W2, t)
        B1 = (W1_hat + W2_hat).scale(quarter)
        B0 = (W1_hat - W2_hat).scale(quarter * sqrt_a)
        Y_tilde = Y - ExactMatrix.block([[B0, B1.scale(-self.a)], [B1, B0.scale(-1)]])
        left, right = self._halves(Y_tilde)
        b = sqrt_a.inverse()
        # bottom halves of the two partial folds; their error row spaces sit
        # inside the corresponding full-fold error row spaces when the folds
        # preserve rank
        U1_noisy = (left - right.scale(b)).split_blocks(self.C.rows, self.C.cols)[2]
        U2_noisy = (left + right.scale(b)).split_blocks(self.C.rows, self.C.cols)[2]
        U1 = self.C.decode_erasures(U1_noisy, F1.row_space_basis())
        U2 = self.C.decode_erasures(U2_noisy, F2.row_space_basis())
        A1 = (U1 + U2).scale(half)
        A0 = (U2 - U1).scale(half * sqrt_a)
        return self.encode(A0, A1, B0, B1)

    def _decode_nonsquare(self, Y, t) -> ExactMatrix:
        field = self.field
        ext = QuadExtField(field, int(self.a.val))
        sqrt_a = ext.sqrt_nonresidue
        W = plotkin_fold(Y, self.a, +1, sqrt_a, ext)
        W_hat = self.D.decode_ext(W, t)
        F = W - W_hat
        half = field.element(2).inverse()
        # entries of W_hat are 2*B1 + (2/a) B0 * sqrt(a)
        B1 = W_hat.map_entries(lambda e: field.element(e.u), field).scale(half)
        B0 = W_hat.map_entries(lambda e: field.element(e.v), field).scale(half * self.a)
        Y_tilde = Y - ExactMatrix.block([[B0, B1.scale(-self.a)], [B1, B0.scale(-1)]])
        left, right = self._halves(Y_tilde)
        b = ext.coerce(sqrt_a).inverse()
        partial = left.map_entries(ext.coerce, ext) - right.map_entries(ext.coerce, ext).scale(b)
        U_noisy = partial.split_blocks(self.C.rows, self.C.cols)[2]
        U = self.C.decode_erasures_ext(U_noisy, F.row_space_basis())
        # entries of U are A1 - (1/a) A0 * sqrt(a)
        A1 = U.map_entries(lambda e: field.element(e.u), field)
        A0 = U.map_entries(lambda e: field.element(e.v), field).scale(-self.a)
        return self.encode(A0, A1, B0, B1)

    def _halves(self, Y):
        tl, tr, bl, br = Y.split_blocks(self.C.rows, self.C.cols)
        return tl.vstack(bl), tr.vstack(br)

    def __repr__(self):
        return (
            f"PlotkinCode(q={self.field.p}, shape={self.rows}x{self.cols}, "
            f"dim={self.dim}, radius={self.radius})"
        )


# field construction hunts for an irreducible modulus; do it once per (q, m)
_EXT_FIELDS: dict = {}


def _ext_field(q: int, m: int) -> ExtField:
    key = (q, m)
    if key not in _EXT_FIELDS:
        _EXT_FIELDS[key] = ExtField(q, m)
    return _EXT_FIELDS[key]


def gabidulin_plotkin(q: int, m: int, k1: int, k2: int, a=1) -> PlotkinCode:
    """Doubled code from two Gabidulin components with matched radii.

    With m = 2*k1 - k2, the D component corrects t = (m - k2)/2 = m - k1
    errors and the C component the same number of erasures, so the result
    decodes rank-t errors in the 2m x 2m ambient.
    """
    if m != 2 * k1 - k2:
        raise ParameterMismatch(f"need m = 2*k1 - k2, got m={m}, k1={k1}, k2={k2}")
    field = _ext_field(q, m)
    C = GabidulinMatrixCode(GabidulinCode(field, k1))
    D = GabidulinMatrixCode(GabidulinCode(field, k2))
    return PlotkinCode(C, D, a, radius=m - k1)


def non_mrd_witness(code: PlotkinCode) -> tuple[ExactMatrix, int]:
    """Codeword showing the doubled code misses the Singleton rank bound.

    Taking A0 of minimal rank in C with every other block zero gives the
    block-diagonal word diag(A0, A0), of rank 2*Rk(A0); for the Gabidulin
    instantiation that is 2(m - k1 + 1), strictly below the MRD distance
    2m - k1 - k2 + 1 whenever m - k2 > 2.  Returns (codeword, MRD bound).
    """
    A0 = code.C.to_matrix(code.C.code.minimum_rank_codeword())
    zero = ExactMatrix.zeros(code.field, code.C.rows, code.C.cols)
    witness = code.encode(A0, zero, zero, zero)
    mrd = code.rows - code.dim // code.rows + 1
    return witness, mrd


@dataclasses.dataclass
class FoldStats:
    """Monte Carlo tally of rank-dropping folds."""

    q: int
    m: int
    t: int
    a: int
    square: bool
    trials: int
    drops: int

    @property
    def rate(self) -> float:
        return self.drops / self.trials if self.trials else 0.0

    def ci95(self) -> tuple[float, float]:
        """Exact (Clopper-Pearson) 95% interval for the drop probability."""
        k, n = self.drops, self.trials
        lo = 0.0 if k == 0 else float(beta_dist.ppf(0.025, k, n - k + 1))
        hi = 1.0 if k == n else float(beta_dist.ppf(0.975, k + 1, n - k))
        return lo, hi

    @property
    def paper_bound(self) -> float:
        if self.square:
            return float(self.q) ** (self.t - self.m - 1)
        return float(self.q) ** (2 * self.t - 2 * self.m - 2)

    def to_json(self) -> dict:
        lo, hi = self.ci95()
        return {
            "q": self.q,
            "m": self.m,
            "t": self.t,
            "a": self.a,
            "square": self.square,
            "trials": self.trials,
            "drops": self.drops,
            "rate": self.rate,
            "ci95": [lo, hi],
            "paper_bound": self.paper_bound,
        }


_FOLD_CHUNK = 4096


def fold_probability_experiment(q: int, m: int, t: int, a: int, trials: int, seed: int) -> FoldStats:
    """Sample uniform rank-t 2m x 2m errors over GF(q) and count how often
    the fold (I | b I) E (b' I ; I) drops rank.

    Square a: b = b' = 1/sqrt(a) in GF(q), fold over GF(q).  Non-square a:
    b = b' = sqrt(a) in GF(q^2), fold tracked as a (u, v) component pair.
    Chunked but chunk-deterministic: chunk i draws from a generator seeded
    with (seed, i), so the tally is a pure function of (params, seed).
    """
    if not 0 <= t < m:
        raise ParameterMismatch("need 0 <= t < m")
    field = PrimeField(q)
    a_el = field.coerce(a)
    if not a_el:
        raise ParameterMismatch("the twist scalar must be nonzero")
    square = field.is_square(a_el)
    if square:
        b = int(field.sqrt(a_el).inverse().val)
    drops = 0
    done = 0
    chunk_index = 0
    while done < trials:
        count = min(_FOLD_CHUNK, trials - done)
        rng = np.random.default_rng(derive_seed(seed, chunk_index))
        E = sample_rank_exact(rng, q, count, 2 * m, 2 * m, t)
        E00, E01 = E[:, :m, :m], E[:, :m, m:]
        E10, E11 = E[:, m:, :m], E[:, m:, m:]
        if t == 0:
            ranks = np.zeros(count, dtype=np.int64)
        elif square:
            folded = (b * E00 + E01 + (b * b % q) * E10 + b * E11) % q
            ranks = batch_rank_mod(folded, q)
        else:
            U = (E01 + (a % q) * E10) % q
            V = (E00 + E11) % q
            ranks = batch_rank_quad(U, V, q, a % q)
        drops += int(np.count_nonzero(ranks < t))
        done += count
        chunk_index += 1
    return FoldStats(q=q, m=m, t=t, a=int(a_el.val), square=square, trials=trials, drops=drops)
