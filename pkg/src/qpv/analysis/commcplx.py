"""Brute-force distributional communication complexity (uniform inputs).

Message functions are enumerated exhaustively; the referee (SMP) and the
receiving decoder (one-way) are not enumerated because their optimal choice
is the per-cell majority vote, which is computed in closed form.  All errors
are exact rationals scaled by 4^n.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .boolfun import BooleanFunction

# enumeration guards: number of (f_A, f_B) pairs for SMP, number of f_A for
# one-way; protocols are message assignments {0,1}^n -> {0,1}^k
SMP_PAIR_BUDGET = 1 << 24
ONEWAY_BUDGET = 1 << 24
_CHUNK = 1 << 14


class BudgetExceeded(Exception):
    """Raised when an enumeration would exceed the configured budget."""


def _num_assignments(side: int, k: int) -> int:
    bits = k * side
    if bits >= 63:
        raise BudgetExceeded(f"2^{bits} message assignments")
    return 1 << bits


def _assignment_chunks(side: int, k: int):
    """Yield (num, side) integer arrays enumerating all message assignments.

    Assignment index i encodes the map x -> (i >> (k*x)) mod 2^k.
    """
    total = _num_assignments(side, k)
    mask = (1 << k) - 1
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        cols = [(idx >> np.uint64(k * x)) & np.uint64(mask) for x in range(side)]
        yield np.stack(cols, axis=1).astype(np.int64)


def _one_hot(assign: np.ndarray, k: int) -> np.ndarray:
    """(num, 2^k, side) indicator array of message values."""
    num, side = assign.shape
    out = np.zeros((num, 1 << k, side), dtype=np.int64)
    batch = np.arange(num)[:, None]
    out[batch, assign, np.arange(side)[None, :]] = 1
    return out


def smp_cc_bruteforce(f: BooleanFunction, k: int,
                      pair_budget: int = SMP_PAIR_BUDGET) -> Fraction:
    """Exact minimal uniform error of k-bit simultaneous message protocols."""
    if k < 1:
        raise ValueError("message length k must be at least 1")
    side = 1 << f.n
    num = _num_assignments(side, k)
    if num * num > pair_budget:
        raise BudgetExceeded(
            f"{num}x{num} message-function pairs exceed budget {pair_budget}")
    m = f.communication_matrix().astype(np.int64)
    best = side * side + 1

    for chunk_b in _assignment_chunks(side, k):
        hot_b = _one_hot(chunk_b, k)                    # (B, 2^k, side)
        for chunk_a in _assignment_chunks(side, k):
            hot_a = _one_hot(chunk_a, k)                # (A, 2^k, side)
            ra = np.einsum("asx,xy->asy", hot_a, m)     # ones per (msg, y)
            na = hot_a.sum(axis=2)                      # inputs per message
            # c1[a,b,s,t]: pairs in cell (s,t) with f=1; tot: cell size
            c1 = np.einsum("asy,bty->abst", ra, hot_b)
            nb = hot_b.sum(axis=2)
            tot = np.einsum("as,bt->abst", na, nb)
            err = np.minimum(c1, tot - c1).sum(axis=(2, 3))
            best = min(best, int(err.min()))
            if best == 0:
                return Fraction(0)
    return Fraction(best, side * side)


def smp_cc(f: BooleanFunction, error: Fraction = Fraction(1, 4),
           k_max: int = 8, pair_budget: int = SMP_PAIR_BUDGET) -> int:
    """Least message length k >= 1 with SMP error at most ``error``."""
    error = Fraction(error)
    for k in range(1, k_max + 1):
        if smp_cc_bruteforce(f, k, pair_budget=pair_budget) <= error:
            return k
    raise BudgetExceeded(f"no protocol with error <= {error} up to k={k_max}")


def oneway_cc_bruteforce(f: BooleanFunction, k: int,
                         budget: int = ONEWAY_BUDGET) -> Fraction:
    """Exact minimal uniform error of k-bit one-way protocols.

    Alice sends f_A(x); Bob, who knows y, applies the optimal decoder, which
    is the majority of f(x, y) over the preimage of the received message.
    """
    if k < 1:
        raise ValueError("message length k must be at least 1")
    side = 1 << f.n
    num = _num_assignments(side, k)
    if num > budget:
        raise BudgetExceeded(f"{num} message functions exceed budget {budget}")
    m = f.communication_matrix().astype(np.int64)
    best = side * side + 1
    for chunk in _assignment_chunks(side, k):
        hot = _one_hot(chunk, k)                        # (A, 2^k, side)
        c1 = np.einsum("asx,xy->asy", hot, m)           # (A, 2^k, side_y)
        tot = hot.sum(axis=2)[:, :, None]
        err = np.minimum(c1, tot - c1).sum(axis=(1, 2))
        best = min(best, int(err.min()))
        if best == 0:
            return Fraction(0)
    return Fraction(best, side * side)
