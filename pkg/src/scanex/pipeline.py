"""End-to-end approximation of the scan statistic CDF with error bounds.

Ties the exact block computations to the 1-dependent approximation theory:
``scan_approximation`` produces the two-term (and optionally four-term)
approximation of ``P(S_m(Lm) <= n)`` together with the new error bound ``E``
and the older fixed-constant bound ``EH``; ``sandwich`` brackets a general
trial count between two exactly computed multiples of ``m``.

``reproduce_table`` regenerates the four reference tables shipped with the
package documentation.  Cell rendering follows the tables' own conventions,
which truncate rather than round at the last kept digit:

* probabilities: round to 6 decimals first (collapsing float dust), print
  "1." for anything reaching 1, otherwise truncate to 5 decimals;
* error bounds: same 6-then-5 treatment while at least 1e-5 survives,
  otherwise scientific notation with a truncated single-digit mantissa;
* coefficient tables: l and the derived columns 1 + alpha*K, 3 +
  alpha*Gamma truncate to 4 decimals, K rounds to 4, Gamma rounds to 3,
  and the derived columns are computed from the printed (rounded) K and
  Gamma, not the full-precision ones.

Three cells of the published originals cannot be regenerated from their
own defining formulas; the renderer stays with the formulas.  See the
"Known discrepancies" section of the README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal

from .extremes import (
    Inapplicable,
    T3Approx,
    T4Approx,
    approx_qn_T3,
    approx_qn_T4,
    error_coefficients,
    legacy_scan_bound,
)
from .scan_exact import BernoulliScanSpec, exact_scan_cdf

__all__ = [
    "COEFF_TABLE_ALPHAS",
    "SCAN_TABLE_PARAMS",
    "ScanReport",
    "SandwichResult",
    "TableResult",
    "truncate",
    "format_probability",
    "format_bound",
    "scan_approximation",
    "sandwich",
    "reproduce_table",
]

COEFF_TABLE_ALPHAS = (0.100, 0.050, 0.025, 0.010)

# (m, p, L, thresholds) for the two scan tables
SCAN_TABLE_PARAMS = {
    3: (9, 0.05, 10, tuple(range(2, 8))),
    4: (10, 0.0165, 15, tuple(range(1, 6))),
}


def truncate(x: float, digits: int) -> float:
    """Truncate toward zero at the given decimal place.

    Works on the shortest decimal representation of the float, so values
    that print as an exact boundary (say 0.99999) truncate to themselves
    rather than falling one ulp short.
    """
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_DOWN))


def format_probability(x: float) -> str:
    """Probability cell: 5 truncated decimals, or "1." once rounding reaches 1."""
    r = round(x, 6)
    if r >= 1.0:
        return "1."
    return f"{truncate(r, 5):.5f}"


def format_bound(x: float) -> str:
    """Bound cell: fixed 5 decimals while anything survives truncation,
    otherwise single-digit scientific notation, mantissa truncated."""
    if x < 0.0:
        raise ValueError("bounds are nonnegative")
    if x == 0.0:
        return "0.00000"
    t = truncate(round(x, 6), 5)
    if t >= 1e-5:
        return f"{t:.5f}"
    e = math.floor(math.log10(x))
    mant = int(x / 10.0**e)
    return f"{mant}e{e:+03d}"


@dataclass(frozen=True)
class ScanReport:
    """Approximation summary for P(S_m(Lm) <= n).

    ``alpha_used`` is 1 - q1 exactly.  When it exceeds the supported range
    the approximation fields are None and ``range_exceeded`` is set; the
    block probabilities (and the exact value, if requested) are still
    reported.  ``EH`` is None whenever 1 - q1 > 0.025, the older bound's
    range.  ``E`` and ``E_T3`` are complete bounds: |approx - exact| <= E.
    """

    m: int
    p: float
    L: int
    n: int
    q1: float
    q2: float
    alpha_used: float
    approx_T4: float | None
    E: float | None
    EH: float | None
    exact: float | None = None
    q3: float | None = None
    q4: float | None = None
    approx_T3: float | None = None
    E_T3: float | None = None
    range_exceeded: bool = False


@dataclass(frozen=True)
class SandwichResult:
    lower: float
    upper: float
    L: int


@dataclass(frozen=True)
class TableResult:
    """Rendered table: header names plus rows of cell strings (None = dash)."""

    headers: tuple[str, ...]
    rows: tuple[tuple[str | None, ...], ...]


def _block_cdf(m: int, p: float, k: int, n: int) -> float:
    return exact_scan_cdf(BernoulliScanSpec(m=m, p=p, N=k * m, n=n))


def scan_approximation(
    m: int,
    p: float,
    L: int,
    n: int,
    want_exact: bool = False,
    want_T3: bool = False,
) -> ScanReport:
    """Approximate P(S_m(Lm) <= n) from q1 and q2 alone.

    q1 and q2 are computed exactly (2m and 3m trials), the level is set to
    alpha = 1 - q1, and the two-term approximation is raised to the power
    L - 1, the number of blocks.  ``want_T3`` additionally computes q3, q4
    and the four-term approximation; ``want_exact`` runs the full chain on
    L*m trials for comparison.
    """
    if L < 2:
        raise ValueError("need L >= 2 (at least one complete block)")
    q1 = _block_cdf(m, p, 2, n)
    q2 = _block_cdf(m, p, 3, n)
    alpha = 1.0 - q1
    exact = _block_cdf(m, p, L, n) if want_exact else None
    q3 = q4 = None
    if want_T3:
        q3 = _block_cdf(m, p, 4, n)
        q4 = _block_cdf(m, p, 5, n)

    t4 = approx_qn_T4(q1, q2, L - 1, min(alpha, 0.1))
    if isinstance(t4, Inapplicable):
        return ScanReport(
            m=m, p=p, L=L, n=n, q1=q1, q2=q2, alpha_used=alpha,
            approx_T4=None, E=None, EH=None, exact=exact,
            q3=q3, q4=q4, range_exceeded=True,
        )
    assert isinstance(t4, T4Approx)
    eh = legacy_scan_bound(q1, L)
    approx_t3 = e_t3 = None
    if want_T3:
        t3 = approx_qn_T3(q1, q2, q3, q4, L - 1, alpha)
        assert isinstance(t3, T3Approx)
        approx_t3, e_t3 = t3.value, t3.delta1
    return ScanReport(
        m=m, p=p, L=L, n=n, q1=q1, q2=q2, alpha_used=alpha,
        approx_T4=t4.value, E=t4.delta2,
        EH=None if isinstance(eh, Inapplicable) else eh,
        exact=exact, q3=q3, q4=q4,
        approx_T3=approx_t3, E_T3=e_t3,
    )


def sandwich(m: int, p: float, N: int, n: int) -> SandwichResult:
    """Exact bracket for P(S_m(N) <= n) when N is not a multiple of m.

    With L = N // m, the CDF is nonincreasing in the trial count, so the
    exact values at (L+1)m and Lm trials enclose it.  Both ends are chain
    computations, not approximations.  N < m is degenerate (no window):
    both ends are 1.
    """
    spec = BernoulliScanSpec(m=m, p=p, N=N, n=n)  # validates the inputs
    L = spec.N // spec.m
    if L == 0:
        return SandwichResult(lower=1.0, upper=1.0, L=0)
    lower = _block_cdf(m, p, L + 1, n)
    upper = _block_cdf(m, p, L, n)
    return SandwichResult(lower=lower, upper=upper, L=L)


def _coeff_table(which: int) -> TableResult:
    rows = []
    for a in COEFF_TABLE_ALPHAS:
        c = error_coefficients(a)
        if which == 1:
            k4 = round(c.K, 4)
            rows.append((
                f"{a:.3f}",
                f"{truncate(c.l, 4):.4f}",
                f"{k4:.4f}",
                f"{truncate(1.0 + a * k4, 4):.4f}",
            ))
        else:
            g3 = round(c.Gamma, 3)
            rows.append((
                f"{a:.3f}",
                f"{g3:.3f}",
                f"{truncate(3.0 + a * g3, 4):.4f}",
            ))
    headers = ("alpha", "l", "K", "1+alpha*K") if which == 1 else (
        "alpha", "Gamma", "3+alpha*Gamma")
    return TableResult(headers=headers, rows=tuple(rows))


def _scan_table(which: int) -> TableResult:
    m, p, L, thresholds = SCAN_TABLE_PARAMS[which]
    rows = []
    for n in thresholds:
        r = scan_approximation(m, p, L, n, want_exact=True)
        rows.append((
            str(n),
            format_probability(r.q1),
            format_probability(r.q2),
            format_probability(r.approx_T4) if r.approx_T4 is not None else None,
            format_probability(r.exact),
            format_bound(r.EH) if r.EH is not None else None,
            format_bound(r.E) if r.E is not None else None,
        ))
    return TableResult(
        headers=("n", "q1", "q2", "approx", "exact", "EH", "E"),
        rows=tuple(rows),
    )


def reproduce_table(which: int) -> TableResult:
    """Regenerate reference table 1, 2, 3 or 4 as rendered cell strings."""
    if which in (1, 2):
        return _coeff_table(which)
    if which in (3, 4):
        return _scan_table(which)
    raise ValueError("table number must be 1, 2, 3 or 4")
