"""Zero level-set extraction (marching squares via scikit-image)."""

from __future__ import annotations

import numpy as np
from skimage.measure import find_contours


def zero_contours(xs, ys, F) -> list[np.ndarray]:
    """Polylines (``(n, 2)`` arrays of x, y) along ``F == 0``.

    ``F`` has shape ``(len(ys), len(xs))`` on a uniform grid. Cells touching
    a NaN are skipped. Crossings are linearly interpolated along cell edges
    and mapped from index space back to ``(x, y)``.
    """
    F = np.asarray(F, dtype=float)
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if F.shape != (ys.size, xs.size):
        raise ValueError(f"F has shape {F.shape}, expected {(ys.size, xs.size)}")
    finite = np.isfinite(F)
    if not finite.any():
        return []
    lines = find_contours(np.where(finite, F, 0.0), 0.0, mask=finite)
    ix, iy = np.arange(xs.size), np.arange(ys.size)
    return [np.column_stack([np.interp(c[:, 1], ix, xs), np.interp(c[:, 0], iy, ys)]) for c in lines]
