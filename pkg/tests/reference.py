"""Naive loop implementations used as independent oracles in the tests."""

import cmath
import math

import numpy as np


def naive_coherence(Y, r_frames=4, lam=0.999, eps=1e-12, ref=0):
    """Direct loops over (l, f, m); no vectorization or shared sums.

    gamma uses the modulus-normalized form on the *unwhitened* short-term
    RTF against the long-term vector, i.e. mean of Re{R r*} / (|R| |r|).
    """
    M, T, F = Y.shape
    others = [m for m in range(M) if m != ref]
    h = r_frames // 2
    gamma = np.zeros((T, F))
    for f in range(F):
        long_term = None
        for l in range(T):
            rtf = []
            for m in others:
                num = 0j
                den = 0.0
                for n in range(l - h, l + h + 1):
                    if 0 <= n < T:
                        num += Y[m, n, f] * Y[ref, n, f].conjugate()
                        den += abs(Y[ref, n, f]) ** 2
                rtf.append(num / max(den, eps))
            if long_term is None:
                gamma[l, f] = 1.0
            else:
                acc = 0.0
                for R, rb in zip(rtf, long_term):
                    if abs(R) >= eps and abs(rb) > 0:
                        acc += (R * rb.conjugate()).real / (abs(R) * abs(rb))
                gamma[l, f] = acc / len(others)
            white = [R / abs(R) if abs(R) >= eps else 0j for R in rtf]
            if long_term is None:
                long_term = white
            else:
                mixed = [lam * rb + (1 - lam) * r for rb, r in zip(long_term, white)]
                long_term = [v / abs(v) if abs(v) >= eps else 0j for v in mixed]
    return gamma


def phase_difference_gamma(r, r_bar):
    """Mean cosine of per-element phase differences (unit-modulus inputs)."""
    return sum(math.cos(cmath.phase(a) - cmath.phase(b)) for a, b in zip(r, r_bar)) / len(r)


def pairwise_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def random_spectrogram(rng, M, T, F):
    return rng.standard_normal((M, T, F)) + 1j * rng.standard_normal((M, T, F))
