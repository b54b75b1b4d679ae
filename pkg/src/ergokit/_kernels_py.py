"""Pure-numpy fallback for the two hot kernels.

The compiled module ergokit._kernels exposes the same two functions with
identical contracts; ergokit._backend picks one at import time.  Keep the
semantics here authoritative: the test suite compares the backends on
random inputs.
"""

from __future__ import annotations

import numpy as np


def mc_max_ratio(TK, K, Z, min_den=1e-300):
    """Best l1 ratio ||TK z||_1 / ||K z||_1 over the rows z of Z.

    TK and K are (n, n); Z is (m, n) of raw sample directions.  Rows whose
    deflected image K z has l1 norm at or below min_den are skipped: a near
    annihilated row carries the deflection's absolute float error as a large
    relative error, which can push its ratio past the true supremum.
    Returns (ratio, row_index), or (-1.0, -1) when every row is degenerate.
    """
    num = np.abs(Z @ TK.T).sum(axis=1)
    den = np.abs(Z @ K.T).sum(axis=1)
    good = den > min_den
    if not good.any():
        return -1.0, -1
    ratios = np.where(good, num / np.where(good, den, 1.0), -1.0)
    idx = int(np.argmax(ratios))
    return float(ratios[idx]), idx


def max_pair_half_l1(R):
    """Max over row pairs i < j of half the l1 distance ||R_i - R_j||_1 / 2.

    Returns (value, i, j); (0.0, -1, -1) when R has fewer than two rows.
    """
    R = np.asarray(R)
    k = R.shape[0]
    if k < 2:
        return 0.0, -1, -1
    best, bi, bj = -1.0, -1, -1
    for i in range(k - 1):
        d = 0.5 * np.abs(R[i + 1 :] - R[i]).sum(axis=1)
        j = int(np.argmax(d))
        if d[j] > best:
            best, bi, bj = float(d[j]), i, i + 1 + j
    return best, bi, bj
