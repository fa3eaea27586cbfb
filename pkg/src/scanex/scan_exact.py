"""Exact distribution of the discrete scan statistic over Bernoulli trials.

``S_m(N)`` is the largest number of successes in any window of ``m``
consecutive trials among ``N``.  The central object is the CDF value
``P(S_m(N) <= n)``, computed exactly by evolving the occupancy of the last
``m - 1`` trials as a Markov chain with one absorbing failure state.  A
direct enumeration over all ``2**N`` outcomes is included as an independent
cross-check for small ``N``.

The block view groups the trials into stretches of length ``m`` and looks
at ``W_k``, the largest window sum among windows starting inside block
``k`` (adjacent blocks share exactly one window).  The ``W_k`` form a
stationary 1-dependent sequence, which is what connects the scan statistic
to the approximation machinery in :mod:`scanex.extremes`:

* ``block_q_sequence``  ->  q_k = P(max(W_1..W_k) <= n) = P(S_m((k+1)m) <= n)
* ``block_p_sequence``  ->  p_k = P(min(W_1..W_k) > n)

Exact computations refuse to run past hard resource caps (``m <= 25`` for
the chain, ``N <= 22`` for enumeration, ``kmax <= 8`` for the joint block
law) instead of silently thrashing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extremes import CapacityError, PSequence, QSequence

__all__ = [
    "MAX_EMBED_M",
    "MAX_BRUTE_N",
    "MAX_BLOCK_K",
    "BernoulliScanSpec",
    "EmbeddingChain",
    "exact_scan_cdf",
    "brute_force_scan_cdf",
    "block_q_sequence",
    "block_p_sequence",
]

MAX_EMBED_M = 25   # chain has 2**(m-1) states
MAX_BRUTE_N = 22   # enumeration touches 2**N outcomes
MAX_BLOCK_K = 8    # joint block law: (kmax+1)*m chain steps with flag doubling


@dataclass(frozen=True)
class BernoulliScanSpec:
    """Problem instance: window length m, success probability p, N trials,
    threshold n (the CDF is evaluated at n, i.e. P(S <= n))."""

    m: int
    p: float
    N: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("p must lie in [0, 1]")


def _popcount_u32(codes: np.ndarray) -> np.ndarray:
    """Per-element bit count of a uint32 array (classic SWAR reduction)."""
    s = codes.astype(np.uint32)
    s = s - ((s >> 1) & np.uint32(0x55555555))
    s = (s & np.uint32(0x33333333)) + ((s >> 2) & np.uint32(0x33333333))
    s = (s + (s >> 4)) & np.uint32(0x0F0F0F0F)
    return ((s * np.uint32(0x01010101)) >> 24).astype(np.int64)


def _fold(a0: np.ndarray, a1: np.ndarray) -> np.ndarray:
    """Push one trial into the state mask: state -> ((state << 1) | bit) mod M.

    ``a0``/``a1`` carry the mass already weighted by the bit probabilities.
    States s and s + M/2 merge into 2s (bit 0) and 2s + 1 (bit 1).
    """
    M = a0.shape[0]
    if M == 1:
        return a0 + a1
    half = M >> 1
    new = np.empty(M)
    new[0::2] = a0[:half] + a0[half:]
    new[1::2] = a1[:half] + a1[half:]
    return new


class EmbeddingChain:
    """Markov embedding for the scan CDF with window length m, threshold n.

    States are the bit masks of the last m - 1 trial outcomes; mass that
    would complete a window with more than n successes is dropped (sent to
    the implicit absorbing state), so the surviving total after N steps is
    P(S_m(N) <= n).  Requires m >= 2; the m = 1 case has no memory and is
    handled in closed form by the callers.
    """

    def __init__(self, m: int, n: int):
        if m < 2:
            raise ValueError("embedding needs m >= 2")
        if m > MAX_EMBED_M:
            raise CapacityError(f"embedding limited to m <= {MAX_EMBED_M}")
        if n < 0:
            raise ValueError("n must be nonnegative")
        self.m = m
        self.n = n
        self.state_count = 1 << (m - 1)
        pc = _popcount_u32(np.arange(self.state_count, dtype=np.uint32))
        # live masks: does appending bit b keep the completed window at <= n
        self._live0 = (pc <= n).astype(float)
        self._live1 = (pc + 1 <= n).astype(float)

    def initial(self) -> np.ndarray:
        v = np.zeros(self.state_count)
        v[0] = 1.0
        return v

    def step(self, v: np.ndarray, p: float, t: int) -> np.ndarray:
        """Advance one trial.  ``t`` is the 1-based index of the trial being
        appended; windows only complete (and can absorb mass) once t >= m."""
        q = 1.0 - p
        if t < self.m:
            return _fold(v * q, v * p)
        return _fold(v * q * self._live0, v * p * self._live1)

    def survival(self, p: float, N: int) -> float:
        v = self.initial()
        for t in range(1, N + 1):
            v = self.step(v, p, t)
        return float(v.sum())


def exact_scan_cdf(spec: BernoulliScanSpec) -> float:
    """P(S_m(N) <= n), exact.

    Degenerate inputs resolve to certainty: n >= m (no window can exceed)
    and N < m (no window exists) both give 1.  Runtime is O(N * 2**(m-1)).
    """
    m, p, N, n = spec.m, spec.p, spec.N, spec.n
    if n >= m or N < m:
        return 1.0
    if m == 1:
        # n = 0 here: every trial is its own window.
        return (1.0 - p) ** N
    chain = EmbeddingChain(m, n)
    return chain.survival(p, N)


def brute_force_scan_cdf(spec: BernoulliScanSpec) -> float:
    """P(S_m(N) <= n) by summing over all 2**N outcomes.  Oracle use only."""
    m, p, N, n = spec.m, spec.p, spec.N, spec.n
    if N > MAX_BRUTE_N:
        raise CapacityError(f"enumeration limited to N <= {MAX_BRUTE_N}")
    if n >= m or N < m:
        return 1.0
    codes = np.arange(1 << N, dtype=np.uint32)
    total = _popcount_u32(codes)
    weights = np.power(p, total) * np.power(1.0 - p, N - total)
    mask = np.uint32((1 << m) - 1)
    ok = np.ones(codes.shape, dtype=bool)
    for s in range(N - m + 1):
        ok &= _popcount_u32((codes >> np.uint32(s)) & mask) <= n
    return float(weights[ok].sum())


def block_q_sequence(m: int, p: float, n: int, kmax: int) -> QSequence:
    """q_k = P(max(W_1..W_k) <= n) for k = 1..kmax.

    Because the first k blocks span exactly (k+1)*m trials, each term is a
    plain scan CDF value and the whole sequence costs kmax chain runs.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    tail = [
        exact_scan_cdf(BernoulliScanSpec(m=m, p=p, N=(k + 1) * m, n=n))
        for k in range(1, kmax + 1)
    ]
    return QSequence.from_tail(tail)


def block_p_sequence(m: int, p: float, n: int, kmax: int) -> PSequence:
    """p_k = P(min(W_1..W_k) > n) for k = 1..kmax, by joint dynamic program.

    Unlike the q side this is not a single scan CDF (all blocks must
    exceed), so the chain state is augmented with one flag: whether the
    block currently being filled has already produced a window above n.
    At each shared window (trial (j+1)*m, j >= 1) block j is settled:
    mass survives only if its flag is set or the shared window exceeds,
    and the flag restarts as the shared window's own exceedance.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if kmax > MAX_BLOCK_K:
        raise CapacityError(f"joint block law limited to kmax <= {MAX_BLOCK_K}")
    if m > MAX_EMBED_M:
        raise CapacityError(f"embedding limited to m <= {MAX_EMBED_M}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")

    M = 1 << (m - 1) if m > 1 else 1
    pc = _popcount_u32(np.arange(M, dtype=np.uint32))
    # exceedance of the window completed by appending bit b to each state
    e0 = pc > n
    e1 = pc + 1 > n
    q = 1.0 - p

    v0 = np.zeros(M)  # flag clear
    v0[0] = 1.0
    v1 = np.zeros(M)  # flag set
    out: list[float] = []
    for t in range(1, (kmax + 1) * m + 1):
        if t < m:
            v0 = _fold(v0 * q, v0 * p)
            continue
        if t >= 2 * m and t % m == 0:
            # settle block t/m - 1 on the shared window
            nv0 = _fold(v1 * q * ~e0, v1 * p * ~e1)
            nv1 = _fold((v1 + v0) * q * e0, (v1 + v0) * p * e1)
            v0, v1 = nv0, nv1
            out.append(float(v0.sum() + v1.sum()))
        else:
            nv0 = _fold(v0 * q * ~e0, v0 * p * ~e1)
            nv1 = _fold(v1 * q + v0 * q * e0, v1 * p + v0 * p * e1)
            v0, v1 = nv0, nv1
    return PSequence((1.0, *out))
