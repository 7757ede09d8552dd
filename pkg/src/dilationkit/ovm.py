"""Operator-valued measures on a finite atom set.

An Ovm holds atoms E({0}), ..., E({n-1}); the measure of a subset encoded by
a bit mask is the sum of the selected atoms.  Classification distinguishes
probability, positive, projection-valued, spectral and self-adjoint measures,
and rank-one measures convert back and forth to framings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _subsets
from .errors import AtomRankTooHigh, TooManyAtoms
from .framings import Framing, check_reconstruction
from .linalg import DEFAULT_REL_TOL, outer_pair, spectral_norm
from .rng import Xorshift

_EXHAUSTIVE_ATOM_LIMIT = 16


@dataclass(frozen=True)
class Ovm:
    """Finitely supported operator-valued measure.

    `atoms` has shape (n, dim_out, dim_in); atom i is the measure of the
    singleton {i}.  Subsets are bit masks: bit i set means atom i included.
    """

    atoms: np.ndarray

    def __post_init__(self):
        arr = np.array(self.atoms)
        if arr.ndim != 3:
            raise ValueError(f"atoms must be a 3d array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ValueError(f"atoms must be non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("atoms contain non-finite entries")
        arr = arr.astype(np.complex128 if np.iscomplexobj(arr) else np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "atoms", arr)

    @property
    def atom_count(self) -> int:
        return self.atoms.shape[0]

    @property
    def dim_out(self) -> int:
        return self.atoms.shape[1]

    @property
    def dim_in(self) -> int:
        return self.atoms.shape[2]

    @property
    def is_square(self) -> bool:
        return self.dim_out == self.dim_in

    @property
    def full_mask(self) -> int:
        return (1 << self.atom_count) - 1

    def evaluate(self, mask: int) -> np.ndarray:
        """Measure of the subset encoded by `mask`, accumulated in index
        order; the empty set gives the zero operator."""
        if not 0 <= mask <= self.full_mask:
            raise ValueError(f"mask {mask} out of range for {self.atom_count} atoms")
        out = np.zeros((self.dim_out, self.dim_in), dtype=self.atoms.dtype)
        for i in range(self.atom_count):
            if mask >> i & 1:
                out += self.atoms[i]
        return out


def dual_ovm(ovm: Ovm) -> Ovm:
    """Measure with adjoint atoms; an involution exchanging dim_in and dim_out."""
    return Ovm(ovm.atoms.conj().transpose(0, 2, 1))


@dataclass(frozen=True)
class OvmClassification:
    """Classification flags, each meaning 'within tolerance on every subset
    examined'.  `sampled` is True when subsets were sampled rather than
    exhaustively enumerated, in which case the flags are one-sided: a False
    is definitive, a True only says no violation was found.
    """

    is_probability: bool
    is_positive: bool
    is_projection_valued: bool
    is_spectral: bool
    is_self_adjoint: bool
    ovm_norm: float
    sampled: bool = False


def classify(
    ovm: Ovm,
    tol: float = 1e-10,
    *,
    sampled: bool = False,
    sample_count: int = 1000,
    seed: int = 0,
    max_exhaustive_atoms: int = _EXHAUSTIVE_ATOM_LIMIT,
) -> OvmClassification:
    """Classify a measure by checking its subset sums.

    Exhaustive over all 2^n subsets for n <= max_exhaustive_atoms; larger
    measures must opt in to sampled mode, which checks the empty set, the
    full set, all singleton and pair sums, and `sample_count` random subsets.

    Raises
    ------
    TooManyAtoms
        If n exceeds the exhaustive limit and sampled mode was not requested.
    """
    n = ovm.atom_count
    if n > max_exhaustive_atoms and not sampled:
        raise TooManyAtoms(
            f"{n} atoms exceed the exhaustive limit {max_exhaustive_atoms}; "
            "pass sampled=True for sampled classification"
        )
    square = ovm.is_square
    norm_sup = 0.0
    herm_sup = 0.0
    idem_sup = 0.0
    min_eig = np.inf
    if not sampled:
        for _, chunk in _subsets.iter_subset_sum_chunks(ovm.atoms):
            norm_sup, herm_sup, idem_sup, min_eig = _update_subset_stats(
                chunk, square, norm_sup, herm_sup, idem_sup, min_eig
            )
    else:
        rng = Xorshift(seed)
        masks = {0, ovm.full_mask}
        masks.update(1 << i for i in range(n))
        masks.update((1 << i) | (1 << j) for i in range(n) for j in range(i + 1, n))
        for _ in range(sample_count):
            masks.add(rng.mask(n))
        stack = np.stack([ovm.evaluate(mask) for mask in sorted(masks)])
        norm_sup, herm_sup, idem_sup, min_eig = _update_subset_stats(
            stack, square, norm_sup, herm_sup, idem_sup, min_eig
        )
    self_adjoint = square and herm_sup <= tol
    positive = self_adjoint and min_eig >= -tol
    projection_valued = square and idem_sup <= tol
    probability = square and spectral_norm(
        ovm.evaluate(ovm.full_mask) - np.eye(ovm.dim_out, dtype=ovm.atoms.dtype)
    ) <= tol
    spectral = square and _spectrality_residual(ovm) <= tol
    return OvmClassification(
        is_probability=probability,
        is_positive=positive,
        is_projection_valued=projection_valued,
        is_spectral=spectral,
        is_self_adjoint=self_adjoint,
        ovm_norm=norm_sup,
        sampled=sampled,
    )


def _update_subset_stats(chunk, square, norm_sup, herm_sup, idem_sup, min_eig):
    norm_sup = max(norm_sup, float(_subsets.batched_spectral_norms(chunk).max()))
    if square:
        adj = chunk.conj().transpose(0, 2, 1)
        herm_sup = max(herm_sup, float(_subsets.batched_spectral_norms(chunk - adj).max()))
        idem_sup = max(
            idem_sup, float(_subsets.batched_spectral_norms(chunk @ chunk - chunk).max())
        )
        sym_eigs = np.linalg.eigvalsh((chunk + adj) / 2)
        min_eig = min(min_eig, float(sym_eigs.min()))
    return norm_sup, herm_sup, idem_sup, min_eig


def _spectrality_residual(ovm: Ovm) -> float:
    """max over atom pairs of ||E_i E_j - delta_ij E_i||; by additivity this
    bounds the multiplicativity defect over all pairs of subsets."""
    atoms = ovm.atoms
    worst = 0.0
    for i in range(ovm.atom_count):
        for j in range(ovm.atom_count):
            prod = atoms[i] @ atoms[j]
            if i == j:
                prod = prod - atoms[i]
            worst = max(worst, spectral_norm(prod))
    return worst


def induced_from_framing(framing: Framing, tol: float = 1e-8) -> Ovm:
    """Rank-one measure with atoms x_i (x) y_i.

    The framing must satisfy its reconstruction identity within `tol`, so the
    induced measure of the full set is the identity within the same bound.
    """
    residual = check_reconstruction(framing)
    if residual > tol:
        raise ValueError(
            f"framing reconstruction residual {residual:.3e} exceeds {tol:.1e}"
        )
    atoms = np.stack(
        [outer_pair(framing.x[i], framing.y[i]) for i in range(framing.count)]
    )
    return Ovm(atoms)


def framing_from_rank_one_ovm(
    ovm: Ovm, rel_tol: float = DEFAULT_REL_TOL, tol: float = 1e-8
) -> Framing:
    """Recover a framing from a probability measure with rank-one atoms.

    Each atom factors as x_i (x) y_i; the unit-modulus freedom in the factors
    is fixed by making the largest-modulus entry of x_i real and positive.
    Atoms that vanish (largest singular value at most rel_tol times the
    global scale) yield zero pairs.

    Raises
    ------
    ValueError
        If the measure is not square or not a probability measure within tol.
    AtomRankTooHigh
        If some atom has numerical rank >= 2.
    """
    if not ovm.is_square:
        raise ValueError("a framing needs dim_out == dim_in")
    total_residual = spectral_norm(
        ovm.evaluate(ovm.full_mask) - np.eye(ovm.dim_out, dtype=ovm.atoms.dtype)
    )
    if total_residual > tol:
        raise ValueError(
            f"measure of the full set deviates from identity by {total_residual:.3e}"
        )
    tops = []
    factors = []
    for i in range(ovm.atom_count):
        u, s, vh = np.linalg.svd(ovm.atoms[i])
        tops.append(float(s[0]) if s.size else 0.0)
        factors.append((u, s, vh))
    scale = max(tops) if tops else 0.0
    xs = np.zeros((ovm.atom_count, ovm.dim_in), dtype=ovm.atoms.dtype)
    ys = np.zeros_like(xs)
    for i, (u, s, vh) in enumerate(factors):
        if tops[i] <= rel_tol * scale:
            continue
        if s.size > 1 and float(s[1]) > rel_tol * float(s[0]):
            raise AtomRankTooHigh(i)
        root = np.sqrt(s[0])
        lead = u[:, 0]
        k = int(np.argmax(np.abs(lead)))
        phase = np.conj(lead[k]) / np.abs(lead[k])
        xs[i] = root * phase * lead
        ys[i] = root * phase * vh[0].conj()
    return Framing(xs, ys)
