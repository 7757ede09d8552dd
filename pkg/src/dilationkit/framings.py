"""Framings: pairs of families (x_i, y_i) reconstructing every vector as
z = sum_i <z, y_i> x_i, together with rescalings and unconditionality
diagnostics for the associated multiplier sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _subsets
from .errors import ZeroPair
from .frames import Frame, _as_vector_array, frame_bounds
from .linalg import outer_pair, spectral_norm
from .rng import Xorshift


@dataclass(frozen=True)
class Framing:
    """Paired families of row vectors with a stored reconstruction tolerance.

    If `tolerance` is omitted it is set to the measured residual
    ||sum_i x_i (x) y_i - I||, so the stored bound always holds.  Passing an
    explicit tolerance turns it into a constructor check.
    """

    x: np.ndarray
    y: np.ndarray
    tolerance: float | None = None

    def __post_init__(self):
        x = _as_vector_array(self.x, "x")
        y = _as_vector_array(self.y, "y")
        if x.shape != y.shape:
            raise ValueError(f"x and y must share a shape, got {x.shape} and {y.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        residual = _reconstruction_residual(x, y)
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", residual)
        elif residual > self.tolerance:
            raise ValueError(
                f"reconstruction residual {residual:.3e} exceeds tolerance {self.tolerance:.1e}"
            )

    @property
    def count(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def frames(self) -> tuple[Frame, Frame]:
        return Frame(self.x), Frame(self.y)


def multiplier_apply(framing: Framing, coeffs) -> np.ndarray:
    """Operator sum_i coeffs[i] x_i (x) y_i, accumulated in index order.

    Terms with an exactly zero coefficient are skipped, so indicator
    coefficients reproduce the corresponding subset sum bit for bit.
    """
    arr = np.asarray(coeffs)
    if arr.shape != (framing.count,):
        raise ValueError(f"need {framing.count} coefficients, got shape {arr.shape}")
    dtype = np.result_type(framing.x.dtype, framing.y.dtype, arr.dtype, np.float64)
    out = np.zeros((framing.dim, framing.dim), dtype=dtype)
    for i in range(framing.count):
        c = arr[i]
        if c == 0:
            continue
        out += c * outer_pair(framing.x[i], framing.y[i])
    return out


def _reconstruction_residual(x: np.ndarray, y: np.ndarray) -> float:
    dim = x.shape[1]
    op = np.zeros((dim, dim), dtype=np.result_type(x.dtype, y.dtype))
    for i in range(x.shape[0]):
        op += outer_pair(x[i], y[i])
    return spectral_norm(op - np.eye(dim, dtype=op.dtype))


def check_reconstruction(framing: Framing) -> float:
    """Residual ||sum_i x_i (x) y_i - I|| of the reconstruction identity."""
    return _reconstruction_residual(framing.x, framing.y)


@dataclass(frozen=True)
class UnconditionalityReport:
    """Bounds on the unconditional norm of the reconstruction expansion.

    K_u is the maximum of ||sum_i s_i x_i (x) y_i|| over sign patterns s,
    each pattern norm computed exactly as a spectral norm (the supremum
    over unit vectors is attained there, no sampling involved).
    subset_sup is the maximum over subsets B of ||sum_{i in B} x_i (x) y_i||.
    The two are equivalent: subset_sup <= K_u <= 2 subset_sup.  `exact`
    records whether every pattern was enumerated or only a sample.
    """

    K_u: float
    exact: bool
    subset_sup: float


_EXHAUSTIVE_PATTERN_LIMIT = 20


def unconditionality_diagnostics(
    framing: Framing, sample_count: int = 1000, seed: int = 0
) -> UnconditionalityReport:
    """Sign-pattern and subset norms of the expansion, exhaustive up to 20 pairs.

    Above 20 pairs, `sample_count` random subsets are examined together with
    the empty set, the full set and all singletons, and `exact` is False.
    Pattern norms reuse the subset sums through
    sum_i s_i T_i = T_full - 2 sum_{i in B} T_i for the flip set B.
    """
    n = framing.count
    atoms = np.stack([outer_pair(framing.x[i], framing.y[i]) for i in range(n)])
    total = atoms.sum(axis=0)
    exact = n <= _EXHAUSTIVE_PATTERN_LIMIT
    subset_sup = 0.0
    pattern_sup = 0.0
    if exact:
        for _, chunk in _subsets.iter_subset_sum_chunks(atoms):
            norms = _subsets.batched_spectral_norms(chunk)
            flipped = _subsets.batched_spectral_norms(total[None, :, :] - 2.0 * chunk)
            subset_sup = max(subset_sup, float(norms.max()))
            pattern_sup = max(pattern_sup, float(flipped.max()))
    else:
        rng = Xorshift(seed)
        masks = {0, (1 << n) - 1}
        masks.update(1 << i for i in range(n))
        while len(masks) < sample_count:
            masks.add(rng.mask(n))
        for mask in sorted(masks):
            part = np.zeros_like(total)
            for i in _subsets.bit_indices(mask):
                part += atoms[i]
            subset_sup = max(subset_sup, spectral_norm(part))
            pattern_sup = max(pattern_sup, spectral_norm(total - 2.0 * part))
    return UnconditionalityReport(K_u=pattern_sup, exact=exact, subset_sup=subset_sup)


@dataclass(frozen=True)
class RescalePlan:
    """Diagonal rescaling (x_i, y_i) -> (alphas[i] x_i, betas[i] y_i).

    The products alphas[i] * conj(betas[i]) must equal 1, so the rescaled
    family is again a framing with the same rank-one terms.
    """

    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        alphas = np.atleast_1d(np.asarray(self.alphas))
        betas = np.atleast_1d(np.asarray(self.betas))
        if alphas.shape != betas.shape or alphas.ndim != 1:
            raise ValueError("alphas and betas must be vectors of equal length")
        products = alphas * np.conj(betas)
        worst = float(np.abs(products - 1.0).max()) if alphas.size else 0.0
        if worst > 1e-12:
            raise ValueError(f"alphas[i] * conj(betas[i]) deviates from 1 by {worst:.3e}")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)


def rescale_sqrt(framing: Framing) -> RescalePlan:
    """Norm-balancing plan with alphas[i] = (||y_i|| / ||x_i||) ** 0.5.

    Raises
    ------
    ZeroPair
        If any pair has ||x_i|| * ||y_i|| = 0; the exception lists every
        offending index.
    """
    nx = np.linalg.norm(framing.x, axis=1)
    ny = np.linalg.norm(framing.y, axis=1)
    bad = np.flatnonzero(nx * ny == 0.0)
    if bad.size:
        raise ZeroPair(bad.tolist())
    alphas = np.sqrt(ny / nx)
    return RescalePlan(alphas=alphas, betas=1.0 / alphas)


def apply_rescale(framing: Framing, plan: RescalePlan) -> Framing:
    if plan.alphas.shape != (framing.count,):
        raise ValueError(f"plan length {plan.alphas.shape[0]} != pair count {framing.count}")
    return Framing(
        plan.alphas[:, None] * framing.x,
        np.conj(plan.betas)[:, None] * framing.y,
    )


def is_dual_frame_pair(x_frame: Frame, y_frame: Frame, tol: float = 1e-8) -> bool:
    """True when both families are frames and sum_i x_i (x) y_i = I within tol."""
    if x_frame.count != y_frame.count or x_frame.dim != y_frame.dim:
        raise ValueError("families must have matching vector counts and dimensions")
    for fam in (x_frame, y_frame):
        bounds = frame_bounds(fam)
        if bounds.upper <= 0.0 or bounds.lower <= 1e-12 * bounds.upper:
            return False
    return _reconstruction_residual(x_frame.vectors, y_frame.vectors) <= tol


def example_e11(m: int) -> Framing:
    """Framing of R^m with m(m+1)/2 pairs: coordinate k is covered by k
    copies of (e_k, e_k / k).  The x side piles up weight k on coordinate k
    while the y side thins it to 1/k, so the pair is a framing whose two
    sides have sharply different frame bounds.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    xs, ys = [], []
    eye = np.eye(m)
    for k in range(1, m + 1):
        for _ in range(k):
            xs.append(eye[k - 1])
            ys.append(eye[k - 1] / k)
    return Framing(np.array(xs), np.array(ys))


def example_e11_weights(m: int) -> tuple[list[Fraction], list[Fraction]]:
    """Exact per-coordinate weight sums of example_e11 in rational arithmetic.

    Coordinate k (1-based) receives k copies of weight 1 on the x side and k
    copies of weight (1/k)^2 on the y side, giving sums k and 1/k exactly.
    """
    x_sums = [Fraction(0)] * m
    y_sums = [Fraction(0)] * m
    for k in range(1, m + 1):
        for _ in range(k):
            x_sums[k - 1] += Fraction(1) ** 2
            y_sums[k - 1] += Fraction(1, k) ** 2
    return x_sums, y_sums


def coordinate_weight_sums(framing: Framing) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate weights (sum_i |x_i[j]|^2, sum_i |y_i[j]|^2), each sum
    compensated via math.fsum."""
    x_sums = np.array(
        [math.fsum((np.abs(framing.x[:, j]) ** 2).tolist()) for j in range(framing.dim)]
    )
    y_sums = np.array(
        [math.fsum((np.abs(framing.y[:, j]) ** 2).tolist()) for j in range(framing.dim)]
    )
    return x_sums, y_sums
