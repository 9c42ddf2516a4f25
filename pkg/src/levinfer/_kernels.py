"""Hot inner loops, with a numba path and a pure-numpy fallback.

The numba kernels are used when numba imports cleanly and the environment
variable ``LEVINFER_DISABLE_JIT`` is unset (or ``0``).  Both paths consume the
same random inputs, so alias tables and draws are bit-identical between them;
the Gram accumulation may differ in the last ulp because summation order
differs.
"""
import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

JIT_DISABLED = os.environ.get("LEVINFER_DISABLE_JIT", "0").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = HAVE_NUMBA and not JIT_DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


# ------------------------------------------------------------------ #
# numpy / pure-python path
# ------------------------------------------------------------------ #

def alias_build_np(prob):
    """Vose alias table for a probability vector.

    Returns ``(accept, alias)``: draw a column ``k`` uniformly, keep it with
    probability ``accept[k]``, otherwise return ``alias[k]``.
    """
    n = prob.shape[0]
    scaled = (prob * n).tolist()
    accept = [1.0] * n
    alias = list(range(n))
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        lo = small.pop()
        hi = large.pop()
        accept[lo] = scaled[lo]
        alias[lo] = hi
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
        if scaled[hi] < 1.0:
            small.append(hi)
        else:
            large.append(hi)
    # leftovers carry rounding residue only; they keep themselves
    return np.asarray(accept, dtype=np.float64), np.asarray(alias, dtype=np.int64)


def alias_draw_np(accept, alias, cols, u):
    return np.where(u < accept[cols], cols, alias[cols])


def count_draws_np(draws, n):
    return np.bincount(draws, minlength=n).astype(np.int64)


def weighted_gram_np(rows, weights):
    """Sum_k weights[k] * rows[k] rows[k]^T."""
    return (rows * weights[:, None]).T @ rows


# ------------------------------------------------------------------ #
# numba path
# ------------------------------------------------------------------ #

if HAVE_NUMBA:

    @njit(cache=True)
    def alias_build_nb(prob):
        n = prob.shape[0]
        scaled = prob * n
        accept = np.ones(n)
        alias = np.arange(n)
        small = np.empty(n, dtype=np.int64)
        large = np.empty(n, dtype=np.int64)
        ns = 0
        nl = 0
        for i in range(n):
            if scaled[i] < 1.0:
                small[ns] = i
                ns += 1
            else:
                large[nl] = i
                nl += 1
        while ns > 0 and nl > 0:
            ns -= 1
            lo = small[ns]
            nl -= 1
            hi = large[nl]
            accept[lo] = scaled[lo]
            alias[lo] = hi
            scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
            if scaled[hi] < 1.0:
                small[ns] = hi
                ns += 1
            else:
                large[nl] = hi
                nl += 1
        return accept, alias

    @njit(cache=True)
    def alias_draw_nb(accept, alias, cols, u):
        out = np.empty(cols.shape[0], dtype=np.int64)
        for k in range(cols.shape[0]):
            c = cols[k]
            out[k] = c if u[k] < accept[c] else alias[c]
        return out

    @njit(cache=True)
    def count_draws_nb(draws, n):
        counts = np.zeros(n, dtype=np.int64)
        for k in range(draws.shape[0]):
            counts[draws[k]] += 1
        return counts

    @njit(cache=True)
    def weighted_gram_nb(rows, weights):
        d, p = rows.shape
        out = np.zeros((p, p))
        for k in range(d):
            wk = weights[k]
            for a in range(p):
                xa = wk * rows[k, a]
                for b in range(a + 1):
                    out[a, b] += xa * rows[k, b]
        for a in range(p):
            for b in range(a):
                out[b, a] = out[a, b]
        return out


if USE_NUMBA:
    alias_build = alias_build_nb
    alias_draw = alias_draw_nb
    count_draws = count_draws_nb
    weighted_gram = weighted_gram_nb
else:
    alias_build = alias_build_np
    alias_draw = alias_draw_np
    count_draws = count_draws_np
    weighted_gram = weighted_gram_np
