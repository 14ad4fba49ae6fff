"""Dense tensor primitives: contraction, SVD and QR on leg bipartitions.

Tensors are plain complex (or real) numpy arrays in row-major layout; legs
are addressed by position. Reshapes between grouped and ungrouped legs are
therefore pure views of the same linearization, which is what makes the
index-split of a physical leg into two half-size legs a free operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError

__all__ = ["SvdResult", "contract", "svd", "qr_orthogonalize", "truncation_rank"]


@dataclass(frozen=True)
class SvdResult:
    """Truncated SVD of a tensor viewed as a matrix over a leg bipartition.

    ``u`` carries the row legs plus a new last leg of extent ``rank``;
    ``v`` carries a new first leg of extent ``rank`` plus the column legs.
    ``discarded_weight`` is the sum of the squares of the dropped singular
    values, i.e. the squared Frobenius error of the truncated reconstruction.
    """

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray
    discarded_weight: float

    @property
    def rank(self) -> int:
        return len(self.singular_values)


def contract(a: np.ndarray, b: np.ndarray, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """Contract paired legs of ``a`` and ``b``.

    ``pairs`` lists ``(leg_of_a, leg_of_b)``. Result legs are the unpaired
    legs of ``a`` followed by those of ``b``, in their original order.
    """
    axes_a = [p[0] for p in pairs]
    axes_b = [p[1] for p in pairs]
    for ia, ib in pairs:
        if a.shape[ia] != b.shape[ib]:
            raise DimensionError(
                f"cannot contract leg {ia} (extent {a.shape[ia]}) with "
                f"leg {ib} (extent {b.shape[ib]})"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def truncation_rank(singular_values: np.ndarray, max_rank: int | None, threshold: float) -> int:
    """Retained rank: min(max_rank, number of values >= threshold * largest)."""
    if len(singular_values) == 0:
        return 0
    keep = int(np.count_nonzero(singular_values >= threshold * singular_values[0]))
    keep = max(keep, 1)
    if max_rank is not None:
        keep = min(keep, max_rank)
    return keep


def svd(
    t: np.ndarray,
    row_legs: Sequence[int],
    col_legs: Sequence[int],
    max_rank: int | None = None,
    threshold: float = 0.0,
) -> SvdResult:
    """SVD of ``t`` viewed as a matrix with rows ``row_legs``, columns ``col_legs``.

    The bipartition must cover every leg exactly once. Truncation keeps
    ``min(max_rank, #{s_k >= threshold * s_1})`` singular values (at least one).
    """
    if t.size == 0:
        raise DimensionError("cannot SVD an empty tensor")
    legs = list(row_legs) + list(col_legs)
    if sorted(legs) != list(range(t.ndim)):
        raise DimensionError(
            f"bipartition {row_legs}|{col_legs} does not cover legs of rank-{t.ndim} tensor"
        )
    row_shape = tuple(t.shape[i] for i in row_legs)
    col_shape = tuple(t.shape[i] for i in col_legs)
    m = t.transpose(legs).reshape(int(np.prod(row_shape)), int(np.prod(col_shape)))
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = truncation_rank(s, max_rank, threshold)
    discarded = float(np.sum(s[keep:] ** 2))
    u = u[:, :keep].reshape(*row_shape, keep)
    vh = vh[:keep].reshape(keep, *col_shape)
    return SvdResult(u=u, singular_values=s[:keep], v=vh, discarded_weight=discarded)


def qr_orthogonalize(
    t: np.ndarray, row_legs: Sequence[int], col_legs: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR of ``t`` over a leg bipartition.

    Returns ``(q, r)`` with ``q`` isometric on the grouped row legs
    (``q^dagger q = 1``) and ``q @ r`` reconstructing the input. A zero
    tensor has no well-defined isometry and raises.
    """
    legs = list(row_legs) + list(col_legs)
    if sorted(legs) != list(range(t.ndim)):
        raise DimensionError(
            f"bipartition {row_legs}|{col_legs} does not cover legs of rank-{t.ndim} tensor"
        )
    row_shape = tuple(t.shape[i] for i in row_legs)
    col_shape = tuple(t.shape[i] for i in col_legs)
    m = t.transpose(legs).reshape(int(np.prod(row_shape)), int(np.prod(col_shape)))
    if not np.any(m):
        raise DimensionError("cannot orthogonalize a zero tensor")
    q, r = np.linalg.qr(m)
    k = q.shape[1]
    return q.reshape(*row_shape, k), r.reshape(k, *col_shape)
