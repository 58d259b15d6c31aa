"""Pure-Python versions of the numeric hot loops (fallback for _ckernels)."""
import cmath
import math


def dirichlet_sum(log_lengths, mults, s_re, s_im):
    """sum_k mults[k] * exp(s * log_lengths[k]) for complex s."""
    s = complex(s_re, s_im)
    total = 0j
    for ll, m in zip(log_lengths, mults):
        total += m * cmath.exp(s * ll)
    return total


def log_binomials(k1, k2, n_terms):
    """log C(n*k2, n*k1) for n = 1..n_terms."""
    out = [0.0] * n_terms
    lg = math.lgamma
    for i in range(n_terms):
        n = i + 1
        a, b = n * k2, n * k1
        out[i] = lg(a + 1.0) - lg(b + 1.0) - lg(a - b + 1.0)
    return out


def partition_log_sum(log_coeffs, k2, s, log_base):
    """log of sum_n exp(log_coeffs[n-1] - k2*n*s*log_base), computed stably."""
    step = k2 * s * log_base
    best = -math.inf
    for i, lc in enumerate(log_coeffs):
        v = lc - step * (i + 1)
        if v > best:
            best = v
    if best == -math.inf:
        return best
    acc = 0.0
    for i, lc in enumerate(log_coeffs):
        acc += math.exp(lc - step * (i + 1) - best)
    return best + math.log(acc)
