"""Hermitian eigensolver for 3x3 complex matrices with continuity tracking.

Instantaneous spectra along a protocol are only meaningful if eigenvector
labels vary smoothly in time.  ``eig_hermitian_3`` produces an ascending
eigendecomposition; ``match_continuity`` relabels a decomposition at the
next time step so that each branch follows the eigenvector it overlaps
most, fixing phases so overlaps are real and positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

HERMITICITY_ATOL = 1e-14
#: overlap-score gap below which a permutation choice counts as ambiguous
AMBIGUITY_TOL = 1e-6


@dataclass
class EigenSystem3:
    """Eigendecomposition of a 3x3 Hermitian matrix.

    ``values`` are real eigenvalues, ``vectors[:, i]`` the orthonormal
    eigenvector for ``values[i]``.  ``ordering`` is ``"by-value"``
    (ascending) or ``"by-continuity"`` (relabelled against a predecessor).
    ``ambiguous`` flags a continuity match that had to be resolved by
    eigenvalue proximity at a near-degeneracy.
    """

    values: np.ndarray
    vectors: np.ndarray
    ordering: str = "by-value"
    ambiguous: bool = False


def _check_hermitian(m: np.ndarray, atol: float) -> None:
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > atol:
        raise ValueError("matrix is not Hermitian within tolerance")


def eig_hermitian_3(m: np.ndarray, atol: float = HERMITICITY_ATOL) -> EigenSystem3:
    """Eigendecompose a Hermitian 3x3 matrix, eigenvalues ascending.

    Raises ``ValueError`` if ``m`` deviates from its conjugate transpose
    by more than ``atol`` entrywise.
    """
    m = np.asarray(m, dtype=complex)
    _check_hermitian(m, atol)
    values, vectors = np.linalg.eigh(m)
    return EigenSystem3(values=values.real, vectors=vectors, ordering="by-value")


def match_continuity(prev: EigenSystem3, cur: EigenSystem3) -> EigenSystem3:
    """Relabel ``cur`` so branch i continues branch i of ``prev``.

    The permutation maximising the summed eigenvector overlaps
    ``sum_i |<prev_i|cur_perm(i)>|`` is selected; ties within
    ``AMBIGUITY_TOL`` (true degeneracies) are broken by eigenvalue
    proximity and then by lexicographic order, and the result is flagged
    ambiguous.  Each matched eigenvector is rephased so its overlap with
    the predecessor is real and positive.
    """
    overlap = prev.vectors.conj().T @ cur.vectors
    score = np.abs(overlap)

    ranked = []
    for perm in permutations(range(3)):
        total = score[0, perm[0]] + score[1, perm[1]] + score[2, perm[2]]
        value_dist = sum(abs(prev.values[i] - cur.values[perm[i]]) for i in range(3))
        ranked.append((-total, value_dist, perm))
    ranked.sort()
    best = ranked[0]
    ambiguous = len(ranked) > 1 and abs(ranked[0][0] - ranked[1][0]) < AMBIGUITY_TOL
    perm = list(best[2])

    values = cur.values[perm]
    vectors = cur.vectors[:, perm].copy()
    for i in range(3):
        ov = overlap[i, perm[i]]
        if abs(ov) > 0:
            vectors[:, i] *= np.conj(ov) / abs(ov)
    return EigenSystem3(values=values, vectors=vectors,
                        ordering="by-continuity", ambiguous=ambiguous)


def follow_branches(hams: np.ndarray, init_state: np.ndarray):
    """Track labelled eigenbranches along a sequence of Hermitian matrices.

    ``hams`` has shape (n, 3, 3).  Labels start ascending at the first
    matrix and follow eigenvector continuity afterwards.  Returns
    ``(values, vectors, start_index, ambiguous)`` where ``values`` is
    (n, 3), ``vectors`` is (n, 3, 3) with branch i in ``vectors[k, :, i]``,
    ``start_index`` is the branch with maximal overlap with
    ``init_state`` at the first time, and ``ambiguous`` is a (n,) bool
    mask of flagged matches.
    """
    n = hams.shape[0]
    all_w, all_v = np.linalg.eigh(hams)
    values = np.empty((n, 3))
    vectors = np.empty((n, 3, 3), dtype=complex)
    ambiguous = np.zeros(n, dtype=bool)

    sys_prev = EigenSystem3(values=all_w[0].real, vectors=all_v[0])
    values[0], vectors[0] = sys_prev.values, sys_prev.vectors
    start_index = int(np.argmax(np.abs(sys_prev.vectors.conj().T @ init_state)))

    for k in range(1, n):
        sys_cur = EigenSystem3(values=all_w[k].real, vectors=all_v[k])
        sys_cur = match_continuity(sys_prev, sys_cur)
        values[k], vectors[k] = sys_cur.values, sys_cur.vectors
        ambiguous[k] = sys_cur.ambiguous
        sys_prev = sys_cur
    return values, vectors, start_index, ambiguous
