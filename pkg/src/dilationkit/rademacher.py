"""Sign-matrix framings on l_p coordinate blocks.

Level n uses the n x 2^n matrix of Rademacher sign patterns: entry (i, j) is
the sign of the i-th Rademacher function on dyadic interval j.  Its rows are
orthogonal with squared norm 2^n exactly, in integer arithmetic.  Scaling
rows by 2^(-n/p) gives unit l_p vectors r_i whose span is complemented in
l_p by the averaging projection P = eps^T eps / 2^n, and the block framing
pairs 2^(-n/q)-scaled columns with 2^(-n/p)-scaled columns (1/p + 1/q = 1).
Rescaling by alpha_i = 2^(n (1/q - 1/2)) turns both sides into one Parseval
frame, the 2^(-n/2)-scaled columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framings import Framing
from .linalg import lp_norm
from .rng import Xorshift

MAX_LEVEL = 14  # keeps eps^T eps integer-exact in float64 well below 2^53


def sign_matrix(n: int) -> np.ndarray:
    """Rademacher sign pattern matrix, shape (n, 2^n), entries +-1 (int64).

    Row i (0-based) flips sign every 2^(n-1-i) columns, so row 0 is the
    coarsest split and row n-1 alternates. Rows are orthogonal:
    eps @ eps.T == 2^n I exactly.
    """
    if not 1 <= n <= MAX_LEVEL:
        raise ValueError(f"level must satisfy 1 <= n <= {MAX_LEVEL}, got {n}")
    cols = np.arange(1 << n, dtype=np.int64)
    rows = [1 - 2 * ((cols >> (n - 1 - i)) & 1) for i in range(n)]
    return np.stack(rows)


@dataclass(frozen=True)
class RademacherBlock:
    """Level-n block data for exponent p."""

    n: int
    p: float
    q: float
    eps: np.ndarray
    r: np.ndarray
    projection: np.ndarray
    alphas: np.ndarray


def build_block(n: int, p: float) -> RademacherBlock:
    """Assemble the level-n block for exponent p (p > 1, p != 2).

    r rows are the unit l_p sign vectors 2^(-n/p) eps_i; projection is the
    averaging idempotent eps^T eps / 2^n onto their span, with exactly
    dyadic entries; alphas are the Parseval rescaling weights
    2^(n (1/q - 1/2)).
    """
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"exponent must exceed 1, got {p}")
    if p == 2.0:
        raise ValueError("exponent 2 is excluded, the block degenerates to an orthonormal one")
    q = p / (p - 1.0)
    eps = sign_matrix(n)
    r = (2.0 ** (-n / p)) * eps
    projection = (eps.T @ eps) / (1 << n)
    alphas = np.full(n, 2.0 ** (n * (1.0 / q - 0.5)))
    return RademacherBlock(
        n=n, p=p, q=q, eps=eps, r=r.astype(np.float64), projection=projection, alphas=alphas
    )


def parseval_frame_vectors(block: RademacherBlock) -> np.ndarray:
    """Rows f_j = 2^(-n/2) eps[:, j], the Parseval frame both rescaled sides
    of the block framing collapse to."""
    return (2.0 ** (-block.n / 2)) * block.eps.T.astype(np.float64)


def parseval_check(block: RademacherBlock, trials: int = 100, seed: int = 0) -> float:
    """Worst relative defect of sum_j <h, f_j>^2 = ||h||^2 over coordinate
    basis vectors and `trials` random normals."""
    f = parseval_frame_vectors(block)
    worst = 0.0
    rng = Xorshift(seed)
    samples = [np.eye(block.n)[k] for k in range(block.n)]
    samples.extend(rng.normals((trials, block.n)))
    for h in samples:
        coeffs = f @ h
        hh = float(h @ h)
        worst = max(worst, abs(float(coeffs @ coeffs) - hh) / hh)
    return worst


def dual_side_check(block: RademacherBlock) -> float:
    """Max deviation between the two expressions for the rescaled dual side:
    alpha_i 2^(-n/q) eps[:, i] versus 2^(n(1/2 - 1/q)) r-side columns.
    Both reduce to 2^(-n/2) eps[:, i]; the deviation is rounding only."""
    n, q = block.n, block.q
    cols = block.eps.T.astype(np.float64)
    left = block.alphas[0] * (2.0 ** (-n / q)) * cols
    right = (2.0 ** (n * (0.5 - 1.0 / q))) * (2.0 ** (-n / block.p)) * cols
    return float(np.abs(left - right).max())


def projection_ratio(block: RademacherBlock, x) -> float:
    """||P x||_p / ||x||_p for one vector."""
    x = np.asarray(x, dtype=np.float64)
    num = lp_norm(block.projection @ x, block.p)
    den = lp_norm(x, block.p)
    if den == 0.0:
        raise ValueError("x must be nonzero")
    return num / den


def projection_norm_evidence(block: RademacherBlock, trials: int = 200, seed: int = 0) -> float:
    """Empirical lower bound for ||P||_{l_p -> l_p}.

    Samples dense normals, sparse vectors, all coordinate vectors and sign
    vectors (including the r rows themselves, where the ratio is exactly 1:
    P r_i = r_i).  The true norm is bounded, so ratios stay within a
    dimension-independent band as n grows.
    """
    dim = 1 << block.n
    rng = Xorshift(seed)
    best = 0.0
    for k in range(block.n):
        best = max(best, projection_ratio(block, block.r[k]))
    for k in range(dim):
        best = max(best, projection_ratio(block, np.eye(dim)[k]))
    for _ in range(trials):
        best = max(best, projection_ratio(block, rng.normals((dim,))))
        sparse = np.zeros(dim)
        support = max(1, int(rng.below(max(block.n, 2))))
        for _ in range(support):
            sparse[rng.below(dim)] = rng.normal()
        if np.any(sparse != 0):
            best = max(best, projection_ratio(block, sparse))
        best = max(best, projection_ratio(block, rng.signs(dim)))
    return best


@dataclass(frozen=True)
class KhintchineReport:
    """Empirical envelope of ||sum_i a_i r_i||_p / ||a||_2 over sampled
    coefficient vectors: lower and upper observed ratios."""

    lower: float
    upper: float
    samples: int


def khintchine_report(block: RademacherBlock, trials: int = 200, seed: int = 0) -> KhintchineReport:
    """Sample the equivalence constants between ||a||_2 and ||sum a_i r_i||_p.

    Includes the coordinate vectors (where the ratio is exactly 1 since
    ||r_i||_p = 1) plus `trials` random normal coefficient vectors.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    rng = Xorshift(seed)
    coeffs = [np.eye(block.n)[k] for k in range(block.n)]
    coeffs.extend(rng.normals((trials, block.n)))
    lower, upper = np.inf, 0.0
    used = 0
    for a in coeffs:
        norm_a = float(np.linalg.norm(a))
        if norm_a == 0.0:
            continue
        ratio = lp_norm(a @ block.r, block.p) / norm_a
        lower = min(lower, ratio)
        upper = max(upper, ratio)
        used += 1
    return KhintchineReport(lower=lower, upper=upper, samples=used)


def assemble_framing(p: float, n_max: int) -> Framing:
    """Framing of the direct sum of the level blocks n = 1 .. n_max.

    Pair (n, i) embeds x = 2^(-n/q) eps[:, i] and y = 2^(-n/p) eps[:, i]
    into block n of the sum; coordinates of different levels never interact.
    The dimension is n_max (n_max + 1) / 2 with sum_n 2^n pairs, capped at
    4096 pairs (n_max <= 11).
    """
    if not 1 <= n_max <= 11:
        raise ValueError(f"n_max must satisfy 1 <= n_max <= 11, got {n_max}")
    if sum(1 << n for n in range(1, n_max + 1)) > 4096:
        raise ValueError("pair budget exceeded")
    dim = n_max * (n_max + 1) // 2
    xs, ys = [], []
    offset = 0
    for n in range(1, n_max + 1):
        block = build_block(n, p)
        q = block.q
        cols = block.eps.T.astype(np.float64)
        for i in range(1 << n):
            x = np.zeros(dim)
            y = np.zeros(dim)
            x[offset : offset + n] = (2.0 ** (-n / q)) * cols[i]
            y[offset : offset + n] = (2.0 ** (-n / block.p)) * cols[i]
            xs.append(x)
            ys.append(y)
        offset += n
    return Framing(np.array(xs), np.array(ys))
