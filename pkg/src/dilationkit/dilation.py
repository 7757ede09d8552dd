"""Dilations of operator-valued measures to idempotent-valued ones.

A dilation triple (S, F, T) represents a measure as E(B) = S F(B) T where F
takes idempotent values on a larger space.  build_block_dilation constructs
one for an arbitrary measure by stacking orthonormal bases of the atom
ranges; naimark_dilate specializes to positive measures, where T can be an
isometry-like factor V with S = V*.  The alpha functional measures the
minimal norm a dilation can certify and omega_upper_bound the maximal one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _subsets
from .errors import ExactModeTooLarge, IndefiniteInput, NotPositive, TooManyAtoms
from .linalg import (
    DEFAULT_REL_TOL,
    fix_column_phases,
    psd_factor,
    spectral_norm,
)
from .ovm import Ovm, _EXHAUSTIVE_ATOM_LIMIT
from .rng import Xorshift

_EXACT_TERM_LIMIT = 24


@dataclass(frozen=True)
class Representation:
    """Formal sum  sum_i coeffs[i] E(. intersect masks[i]) vectors[i].

    Each term pairs a scalar coefficient, a subset mask, and a vector in the
    measure's input space.
    """

    coeffs: np.ndarray
    masks: tuple
    vectors: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs))
        vectors = np.atleast_2d(np.asarray(self.vectors))
        masks = tuple(int(m) for m in self.masks)
        if coeffs.ndim != 1 or vectors.ndim != 2:
            raise ValueError("coeffs must be a vector and vectors a 2d array")
        if not (len(coeffs) == len(masks) == vectors.shape[0]):
            raise ValueError("coeffs, masks and vectors must have equal lengths")
        if any(m < 0 for m in masks):
            raise ValueError("masks must be non-negative")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "vectors", vectors)

    @classmethod
    def from_terms(cls, terms) -> "Representation":
        coeffs, masks, vectors = [], [], []
        for coeff, mask, vector in terms:
            coeffs.append(coeff)
            masks.append(mask)
            vectors.append(np.asarray(vector))
        return cls(np.array(coeffs), tuple(masks), np.array(vectors))

    @property
    def term_count(self) -> int:
        return len(self.masks)

    def scaled(self, c) -> "Representation":
        return Representation(c * self.coeffs, self.masks, self.vectors)


def _check_rep(ovm: Ovm, rep: Representation):
    if rep.vectors.shape[1] != ovm.dim_in:
        raise ValueError(
            f"representation vectors have dimension {rep.vectors.shape[1]}, "
            f"measure expects {ovm.dim_in}"
        )
    if any(mask > ovm.full_mask for mask in rep.masks):
        raise ValueError("representation masks reference atoms beyond the measure")


def _atom_images(ovm: Ovm, rep: Representation):
    """Per-atom vectors v_j = E({j}) applied to the combined coefficient of
    atom j across all terms; the alpha functional is the largest euclidean
    norm of a subset sum of these."""
    n = ovm.atom_count
    dtype = np.result_type(ovm.atoms.dtype, rep.coeffs.dtype, rep.vectors.dtype)
    images = np.zeros((n, ovm.dim_out), dtype=dtype)
    for j in range(n):
        combined = np.zeros(ovm.dim_in, dtype=dtype)
        for i in range(rep.term_count):
            if rep.masks[i] >> j & 1:
                combined += rep.coeffs[i] * rep.vectors[i]
        images[j] = ovm.atoms[j] @ combined
    return images


@dataclass(frozen=True)
class AlphaNorm:
    """Value of the alpha functional and the subset attaining it.

    `witness` is the lexicographically smallest maximizing mask (masks
    compared as ascending tuples of atom indices).
    """

    value: float
    witness: int


def alpha_norm(ovm: Ovm, rep: Representation, exact_limit: int = _EXACT_TERM_LIMIT) -> AlphaNorm:
    """Exact alpha functional sup_B || sum_i coeffs[i] E(B intersect masks[i]) vectors[i] ||.

    The supremum is over all subsets; by additivity it reduces to the largest
    norm of a subset sum of the per-atom image vectors, enumerated exactly.
    Atoms with an exactly zero image are excluded before enumeration.

    Raises
    ------
    ExactModeTooLarge
        If more than `exact_limit` atoms have nonzero images; use
        alpha_norm_bounds for certified two-sided bounds instead.
    """
    _check_rep(ovm, rep)
    images = _atom_images(ovm, rep)
    nonzero = [j for j in range(images.shape[0]) if np.any(images[j] != 0)]
    if len(nonzero) > exact_limit:
        raise ExactModeTooLarge(
            f"{len(nonzero)} nonzero atoms exceed the exact enumeration ceiling {exact_limit}"
        )
    value, reduced = _subsets.max_subset_norm(images[nonzero])
    witness = 0
    for pos, j in enumerate(nonzero):
        if reduced >> pos & 1:
            witness |= 1 << j
    return AlphaNorm(value=value, witness=witness)


@dataclass(frozen=True)
class AlphaBounds:
    """Certified enclosure lower <= alpha <= upper from heuristic search.

    `witness` attains `lower`; `upper` is the triangle-inequality bound
    sum_j ||v_j||.
    """

    lower: float
    upper: float
    witness: int


def alpha_norm_bounds(ovm: Ovm, rep: Representation) -> AlphaBounds:
    """Two-sided alpha bounds without exhaustive enumeration.

    The lower bound comes from a greedy pass over atoms in decreasing image
    norm, keeping an atom whenever it increases the running norm; the subset
    it builds is a genuine candidate, so the bound is certified.
    """
    _check_rep(ovm, rep)
    images = _atom_images(ovm, rep)
    norms = np.linalg.norm(images, axis=1)
    order = sorted(range(len(norms)), key=lambda j: -norms[j])
    current = np.zeros(images.shape[1], dtype=images.dtype)
    current_norm = 0.0
    witness = 0
    for j in order:
        if norms[j] == 0.0:
            break
        candidate = current + images[j]
        candidate_norm = float(np.linalg.norm(candidate))
        if candidate_norm > current_norm:
            current = candidate
            current_norm = candidate_norm
            witness |= 1 << j
    return AlphaBounds(lower=current_norm, upper=float(norms.sum()), witness=witness)


def omega_upper_bound(ovm: Ovm, rep: Representation, exact_limit: int = _EXACT_TERM_LIMIT) -> float:
    """Representation-dependent upper bound for the omega functional:
    the sum over terms of sup_B || coeffs[i] E(B intersect masks[i]) vectors[i] ||.

    Each term's supremum is enumerated exactly, so on a single-term
    representation this equals alpha_norm exactly (same arithmetic path).

    Raises
    ------
    ExactModeTooLarge
        If a term touches more than `exact_limit` atoms with nonzero images.
    """
    _check_rep(ovm, rep)
    total = 0.0
    for i in range(rep.term_count):
        single = Representation(
            rep.coeffs[i : i + 1], (rep.masks[i],), rep.vectors[i : i + 1]
        )
        images = _atom_images(ovm, single)
        nonzero = [j for j in range(images.shape[0]) if np.any(images[j] != 0)]
        if len(nonzero) > exact_limit:
            raise ExactModeTooLarge(
                f"term {i} has {len(nonzero)} nonzero atoms, above the ceiling {exact_limit}"
            )
        value, _ = _subsets.max_subset_norm(images[nonzero])
        total += value
    return total


@dataclass(frozen=True)
class DilationTriple:
    """Factorization E(B) = left @ f(B) @ right with idempotent-valued f.

    f_atoms[j] is the f-measure of the singleton {j}; f of a subset is the
    sum of the selected f_atoms.  In block form, coordinate indices of the
    dilation space are grouped per atom with `block_ranks[j]` coordinates
    for atom j, and f_atoms[j] is the 0/1 diagonal indicator of its group.
    """

    left: np.ndarray
    right: np.ndarray
    f_atoms: np.ndarray
    block_ranks: tuple

    @property
    def atom_count(self) -> int:
        return self.f_atoms.shape[0]

    @property
    def total_dim(self) -> int:
        return self.f_atoms.shape[1]

    @property
    def dim_out(self) -> int:
        return self.left.shape[0]

    @property
    def dim_in(self) -> int:
        return self.right.shape[1]

    @property
    def full_mask(self) -> int:
        return (1 << self.atom_count) - 1

    def f_evaluate(self, mask: int) -> np.ndarray:
        if not 0 <= mask <= self.full_mask:
            raise ValueError(f"mask {mask} out of range for {self.atom_count} atoms")
        out = np.zeros(self.f_atoms.shape[1:], dtype=self.f_atoms.dtype)
        for j in range(self.atom_count):
            if mask >> j & 1:
                out += self.f_atoms[j]
        return out

    def evaluate(self, mask: int) -> np.ndarray:
        return self.left @ self.f_evaluate(mask) @ self.right

    def atom_products(self) -> np.ndarray:
        """Stack of left @ f_atoms[j] @ right; subset sums of these are the
        dilated measure, by linearity."""
        return np.stack([self.left @ self.f_atoms[j] @ self.right for j in range(self.atom_count)])


def build_block_dilation(ovm: Ovm, rel_tol: float = DEFAULT_REL_TOL) -> DilationTriple:
    """Dilate an arbitrary measure to a diagonal idempotent-valued one.

    The dilation space is the direct sum over atoms of range E({j}), with an
    orthonormal basis q_j of each range.  left collects the bases side by
    side, right stacks q_j* E({j}), and f_atoms[j] is the coordinate
    indicator of block j, so left @ f(B) @ right telescopes to
    sum_{j in B} q_j q_j* E({j}) = E(B).  Atoms of rank zero contribute
    empty blocks and are skipped; f of the full set is still the identity.
    """
    bases = []
    ranks = []
    for j in range(ovm.atom_count):
        atom = ovm.atoms[j]
        u, s, _ = np.linalg.svd(atom)
        rank = int(np.count_nonzero(s > rel_tol * s[0])) if s.size and s[0] > 0 else 0
        ranks.append(rank)
        bases.append(fix_column_phases(u[:, :rank]))
    total = sum(ranks)
    dtype = ovm.atoms.dtype
    left = np.zeros((ovm.dim_out, total), dtype=dtype)
    right = np.zeros((total, ovm.dim_in), dtype=dtype)
    f_atoms = np.zeros((ovm.atom_count, total, total))
    offset = 0
    for j, (q, rank) in enumerate(zip(bases, ranks)):
        stop = offset + rank
        left[:, offset:stop] = q
        right[offset:stop, :] = q.conj().T @ ovm.atoms[j]
        f_atoms[j, offset:stop, offset:stop] = np.eye(rank)
        offset = stop
    return DilationTriple(left=left, right=right, f_atoms=f_atoms, block_ranks=tuple(ranks))


@dataclass(frozen=True)
class NaimarkDilation:
    """Positive-measure dilation E(B) = isometry* @ f(B) @ isometry.

    For a probability measure the stacked factor satisfies
    isometry* @ isometry = I, i.e. it embeds the space isometrically and the
    measure is the compression of the diagonal idempotent measure f.
    """

    isometry: np.ndarray
    f_atoms: np.ndarray
    block_ranks: tuple

    @property
    def total_dim(self) -> int:
        return self.isometry.shape[0]

    def as_triple(self) -> DilationTriple:
        return DilationTriple(
            left=self.isometry.conj().T,
            right=self.isometry,
            f_atoms=self.f_atoms,
            block_ranks=self.block_ranks,
        )


def naimark_dilate(ovm: Ovm, rel_tol: float = DEFAULT_REL_TOL) -> NaimarkDilation:
    """Dilate a positive measure through per-atom factorizations E({j}) = V_j* V_j.

    Parameters
    ----------
    ovm : Ovm
        Square measure with Hermitian positive semidefinite atoms, up to
        rel_tol relative slack.

    Raises
    ------
    ValueError
        If the measure is not square.
    NotPositive
        If some atom is non-Hermitian or has a significantly negative
        eigenvalue; carries the atom index.
    """
    if not ovm.is_square:
        raise ValueError("positive measures must be square")
    factors = []
    ranks = []
    for j in range(ovm.atom_count):
        atom = ovm.atoms[j]
        herm_defect = spectral_norm(atom - atom.conj().T)
        if herm_defect > rel_tol * max(1.0, spectral_norm(atom)):
            raise NotPositive(j, f"atom {j} is not Hermitian (defect {herm_defect:.3e})")
        try:
            v, rank = psd_factor(atom, rel_tol)
        except IndefiniteInput as exc:
            raise NotPositive(j, f"atom {j} is not positive semidefinite: {exc}") from exc
        factors.append(v)
        ranks.append(rank)
    total = sum(ranks)
    isometry = np.zeros((total, ovm.dim_in), dtype=ovm.atoms.dtype)
    f_atoms = np.zeros((ovm.atom_count, total, total))
    offset = 0
    for j, (v, rank) in enumerate(zip(factors, ranks)):
        stop = offset + rank
        isometry[offset:stop] = v
        f_atoms[j, offset:stop, offset:stop] = np.eye(rank)
        offset = stop
    return NaimarkDilation(isometry=isometry, f_atoms=f_atoms, block_ranks=tuple(ranks))


def compress_to_probability(triple: DilationTriple) -> DilationTriple:
    """Restrict a triple to the range of f(full set), normalizing f to a
    probability measure.

    With r an orthonormal basis of range f(Omega), the compressed triple is
    (left r, r* f r, r* f(Omega) right); its f of the full set is the
    identity and it reproduces the same measure, with
    left_hat @ right_hat = E(Omega).  When every f atom is a 0/1 coordinate
    indicator the compression just drops the unused coordinates, exactly.
    """
    f_total = triple.f_evaluate(triple.full_mask)
    diag = np.diagonal(f_total)
    coordinate = (
        np.count_nonzero(f_total - np.diag(diag)) == 0
        and np.all((diag == 0.0) | (diag == 1.0))
        and all(
            np.count_nonzero(f - np.diag(np.diagonal(f))) == 0
            and np.all((np.diagonal(f) == 0.0) | (np.diagonal(f) == 1.0))
            for f in triple.f_atoms
        )
    )
    if coordinate:
        keep = np.flatnonzero(diag == 1.0)
        f_new = triple.f_atoms[:, keep][:, :, keep]
        ranks = tuple(int(np.diagonal(f).sum()) for f in f_new)
        return DilationTriple(
            left=triple.left[:, keep],
            right=triple.right[keep, :],
            f_atoms=f_new,
            block_ranks=ranks,
        )
    u, s, _ = np.linalg.svd(f_total)
    rank = int(np.count_nonzero(s > 0.5))
    basis = fix_column_phases(u[:, :rank])
    f_new = np.stack([basis.conj().T @ f @ basis for f in triple.f_atoms])
    ranks = tuple(
        int(np.count_nonzero(np.linalg.svd(f, compute_uv=False) > 0.5)) if min(f.shape) else 0
        for f in f_new
    )
    return DilationTriple(
        left=triple.left @ basis,
        right=basis.conj().T @ (f_total @ triple.right),
        f_atoms=f_new,
        block_ranks=ranks,
    )


@dataclass(frozen=True)
class DilationReport:
    """Residuals and invariants of a triple checked against a measure.

    All residuals are spectral norms.  `eval_residual` is the maximum of
    ||E(B) - left f(B) right|| over the subsets examined;
    `f_multiplicative_residual` covers f(A)f(B) = f(A intersect B) through
    atom pairs, which is equivalent by additivity.  The probability fields
    are None unless the measure of the full set is the identity, in which
    case they certify that right @ left @ f(Omega) and f(Omega) @ right @ left
    are idempotent.  `block_rank_pairs` lists (rank f({j}), rank E({j}));
    a structure-preserving dilation keeps them equal.
    """

    eval_residual: float
    f_total_residual: float
    f_multiplicative_residual: float
    f_self_adjoint_residual: float
    rank_left: int
    right_min_singular: float
    block_rank_pairs: tuple
    ranks_match: bool
    e_total_residual: float | None
    probability_idempotent_residual: float | None
    st_residual: float | None
    sampled: bool


def verify_dilation(
    ovm: Ovm,
    triple: DilationTriple,
    *,
    sample_count: int = 1000,
    seed: int = 0,
    max_exhaustive_atoms: int = _EXHAUSTIVE_ATOM_LIMIT,
) -> DilationReport:
    """Measure how well a triple dilates a measure; raises nothing on bad
    triples, the residuals simply grow.

    Subset enumeration is exhaustive for measures with at most
    `max_exhaustive_atoms` atoms and sampled above that (empty, full,
    singletons and random masks), recorded in the `sampled` flag.
    """
    if triple.atom_count != ovm.atom_count:
        raise ValueError("triple and measure have different atom counts")
    if triple.dim_out != ovm.dim_out or triple.dim_in != ovm.dim_in:
        raise ValueError("triple and measure have mismatched dimensions")
    n = ovm.atom_count
    deltas = ovm.atoms - triple.atom_products()
    sampled = n > max_exhaustive_atoms
    if not sampled:
        eval_residual = 0.0
        for _, chunk in _subsets.iter_subset_sum_chunks(deltas):
            eval_residual = max(
                eval_residual, float(_subsets.batched_spectral_norms(chunk).max())
            )
    else:
        rng = Xorshift(seed)
        masks = {0, ovm.full_mask}
        masks.update(1 << i for i in range(n))
        for _ in range(sample_count):
            masks.add(rng.mask(n))
        eval_residual = 0.0
        for mask in sorted(masks):
            delta = np.zeros((ovm.dim_out, ovm.dim_in), dtype=deltas.dtype)
            for j in _subsets.bit_indices(mask):
                delta += deltas[j]
            eval_residual = max(eval_residual, spectral_norm(delta))
    f_total = triple.f_evaluate(triple.full_mask)
    eye = np.eye(triple.total_dim)
    f_total_residual = spectral_norm(f_total - eye)
    mult = 0.0
    for i in range(n):
        for j in range(n):
            prod = triple.f_atoms[i] @ triple.f_atoms[j]
            if i == j:
                prod = prod - triple.f_atoms[i]
            mult = max(mult, spectral_norm(prod))
    self_adj = max(
        (spectral_norm(f - f.conj().T) for f in triple.f_atoms), default=0.0
    )
    rank_left = int(np.linalg.matrix_rank(triple.left)) if triple.left.size else 0
    if triple.right.size:
        right_min_singular = float(np.linalg.svd(triple.right, compute_uv=False).min())
    else:
        right_min_singular = 0.0
    pairs = []
    for j in range(n):
        f_rank = int(np.count_nonzero(np.linalg.svd(triple.f_atoms[j], compute_uv=False) > 0.5)) if triple.total_dim else 0
        s = np.linalg.svd(ovm.atoms[j], compute_uv=False)
        atom_rank = int(np.count_nonzero(s > DEFAULT_REL_TOL * s[0])) if s.size and s[0] > 0 else 0
        pairs.append((f_rank, atom_rank))
    e_total_residual = None
    prob_idem = None
    st_residual = None
    if ovm.is_square:
        e_total = ovm.evaluate(ovm.full_mask)
        e_total_residual = spectral_norm(e_total - np.eye(ovm.dim_out, dtype=ovm.atoms.dtype))
        st_residual = spectral_norm(triple.left @ triple.right - e_total)
        if e_total_residual <= 1e-8:
            g1 = triple.right @ triple.left @ f_total
            g2 = f_total @ triple.right @ triple.left
            prob_idem = max(
                spectral_norm(g1 @ g1 - g1), spectral_norm(g2 @ g2 - g2)
            )
    return DilationReport(
        eval_residual=eval_residual,
        f_total_residual=f_total_residual,
        f_multiplicative_residual=mult,
        f_self_adjoint_residual=self_adj,
        rank_left=rank_left,
        right_min_singular=right_min_singular,
        block_rank_pairs=tuple(pairs),
        ranks_match=all(a == b for a, b in pairs),
        e_total_residual=e_total_residual,
        probability_idempotent_residual=prob_idem,
        st_residual=st_residual,
        sampled=sampled,
    )


@dataclass(frozen=True)
class MinimalityGap:
    """alpha <= constant * triple_norm, the cost of routing a representation
    through a dilation: `constant` is max_B ||left f(B)|| and `triple_norm`
    the norm of sum_i coeffs[i] f(masks[i]) right vectors[i]."""

    alpha: float
    triple_norm: float
    constant: float


def minimality_gap(ovm: Ovm, rep: Representation, triple: DilationTriple) -> MinimalityGap:
    """Compare the alpha functional with its bound through a dilation triple.

    Raises
    ------
    TooManyAtoms
        If the measure has more than 16 atoms (the constant needs an
        exhaustive subset enumeration).
    """
    if ovm.atom_count > _EXHAUSTIVE_ATOM_LIMIT:
        raise TooManyAtoms("minimality constant needs at most 16 atoms")
    alpha = alpha_norm(ovm, rep).value
    acc = np.zeros(
        triple.total_dim,
        dtype=np.result_type(triple.right.dtype, rep.coeffs.dtype, rep.vectors.dtype),
    )
    for i in range(rep.term_count):
        lifted = triple.right @ rep.vectors[i]
        acc = acc + rep.coeffs[i] * (triple.f_evaluate(rep.masks[i]) @ lifted)
    triple_norm = float(np.linalg.norm(acc))
    stack = np.stack([triple.left @ triple.f_atoms[j] for j in range(triple.atom_count)])
    constant = 0.0
    for _, chunk in _subsets.iter_subset_sum_chunks(stack, chunk_bits=10):
        constant = max(constant, float(_subsets.batched_spectral_norms(chunk).max()))
    return MinimalityGap(alpha=alpha, triple_norm=triple_norm, constant=constant)
