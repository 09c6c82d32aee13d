"""Closed-form download costs, leakage thresholds, and capacities.

Every quantity here is an exact ``fractions.Fraction``; no floating point
enters this module.  An operating point that cannot satisfy retrieval,
privacy, and the leakage budget simultaneously is reported as an infinite
download cost with capacity zero rather than as an error, so parameter
sweeps can cross the infeasible region gracefully.

Conventions: ``n`` databases, ``k`` messages, message length ``length``
(in symbols), total-leakage budget ``s``, per-message budget ``w``, and
``rho`` the amount of shared database randomness per message symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError


def _check_system(n: int, k: int) -> None:
    if n < 2:
        raise ParameterError(f"need at least 2 databases, got {n}")
    if k < 2:
        raise ParameterError(f"need at least 2 messages, got {k}")


@dataclass(frozen=True)
class TradeoffPoint:
    """One point on a download-versus-leakage curve.

    ``d_min`` is None when the point is infeasible (infinite download);
    ``capacity`` is length/d_min, or zero at an infeasible point.
    """

    constraint: Fraction
    d_min: Fraction | None
    rho_min: Fraction
    capacity: Fraction

    @property
    def is_infinite(self) -> bool:
        return self.d_min is None


@dataclass(frozen=True)
class ReferencePerformance:
    """Stated performance of one of the three baseline codes."""

    scheme: str
    length: Fraction
    download: Fraction
    total_leakage: Fraction
    individual_leakage: Fraction
    rho: Fraction


def d_min_zero(n: int, k: int, length: int) -> Fraction:
    """Download floor without any security constraint.

    Equals length * (1 + 1/n + ... + 1/n^(k-1)).
    """
    _check_system(n, k)
    return Fraction(length * (n**k - 1), n ** (k - 1) * (n - 1))


def thresholds(n: int, k: int) -> tuple[Fraction, Fraction]:
    """Budgets beyond which each curve flattens to the unconstrained floor.

    Returns (s_t, w_t) with s_t = (1 - n^(1-k)) / (n - 1) and
    w_t = n^(1-k); their ratio is 1 + n + ... + n^(k-2).
    """
    _check_system(n, k)
    w_t = Fraction(1, n ** (k - 1))
    s_t = Fraction(1, n - 1) * (1 - w_t)
    return s_t, w_t


def rho_min_total(n: int, k: int, s: Fraction) -> Fraction:
    """Least shared randomness per message symbol under a total budget s.

    1/(n-1) - n^(k-1)/(n^(k-1)-1) * s, floored at zero (the formula hits
    zero exactly at the threshold s_t and would go negative past it).
    """
    _check_system(n, k)
    value = Fraction(1, n - 1) - Fraction(n ** (k - 1), n ** (k - 1) - 1) * s
    return max(value, Fraction(0))


def rho_min_individual(n: int, k: int, w: Fraction) -> Fraction:
    """Least shared randomness under a per-message budget w.

    1/(n-1) - n/(n-1) * w for two messages (floored at zero); zero for
    three or more, where one unwanted message can serve as the mask.
    """
    _check_system(n, k)
    if k == 2:
        value = Fraction(1, n - 1) - Fraction(n, n - 1) * w
        return max(value, Fraction(0))
    return Fraction(0)


def d_min_total(n: int, k: int, length: int, s: Fraction, rho: Fraction) -> TradeoffPoint:
    """Optimal download cost under a total-leakage budget s.

    length * (n/(n-1) - s/(n^(k-1)-1)) up to the threshold s_t, the
    unconstrained floor beyond it, and infinite whenever rho falls below
    rho_min_total(n, k, s).
    """
    _check_system(n, k)
    s = Fraction(s)
    rho = Fraction(rho)
    if length < 1:
        raise ParameterError(f"message length must be positive, got {length}")
    if s < 0:
        raise ParameterError(f"leakage budget must be nonnegative, got {s}")
    if rho < 0:
        raise ParameterError(f"randomness amount must be nonnegative, got {rho}")
    floor = rho_min_total(n, k, s)
    if rho < floor:
        return TradeoffPoint(s, None, floor, Fraction(0))
    s_t, _ = thresholds(n, k)
    if s <= s_t:
        d = length * (Fraction(n, n - 1) - Fraction(1, n ** (k - 1) - 1) * s)
    else:
        d = d_min_zero(n, k, length)
    return TradeoffPoint(s, d, floor, Fraction(length) / d)


def d_min_individual(n: int, k: int, length: int, w: Fraction, rho: Fraction) -> TradeoffPoint:
    """Optimal download cost under a per-message leakage budget w.

    length * (n/(n-1) - w/(n-1)) up to the threshold w_t = n^(1-k), the
    unconstrained floor beyond it, and infinite whenever rho falls below
    rho_min_individual(n, k, w).
    """
    _check_system(n, k)
    w = Fraction(w)
    rho = Fraction(rho)
    if length < 1:
        raise ParameterError(f"message length must be positive, got {length}")
    if w < 0:
        raise ParameterError(f"leakage budget must be nonnegative, got {w}")
    if rho < 0:
        raise ParameterError(f"randomness amount must be nonnegative, got {rho}")
    floor = rho_min_individual(n, k, w)
    if rho < floor:
        return TradeoffPoint(w, None, floor, Fraction(0))
    _, w_t = thresholds(n, k)
    if w <= w_t:
        d = length * (Fraction(n, n - 1) - Fraction(1, n - 1) * w)
    else:
        d = d_min_zero(n, k, length)
    return TradeoffPoint(w, d, floor, Fraction(length) / d)


def capacity_alpha(n: int, alpha: int) -> Fraction:
    """Capacity of the budget family indexed by an integer alpha >= 1.

    (1 + 1/n + ... + 1/n^alpha)^(-1); decreasing in alpha with limit
    1 - 1/n.
    """
    if n < 2:
        raise ParameterError(f"need at least 2 databases, got {n}")
    if alpha < 1:
        raise ParameterError(f"alpha must be at least 1, got {alpha}")
    return Fraction(n**alpha * (n - 1), n ** (alpha + 1) - 1)


def specialized_budgets(n: int, k: int, alpha: int) -> tuple[Fraction, Fraction]:
    """The (s, w) pair whose two tradeoff curves meet capacity_alpha(n, alpha).

    s = (n^(k-1) - 1) / ((n - 1) n^alpha) and w = n^(-alpha); alpha must be
    at least k - 1 so both budgets sit at or below their thresholds.
    """
    _check_system(n, k)
    if alpha < k - 1:
        raise ParameterError(f"alpha must be at least {k - 1}, got {alpha}")
    w = Fraction(1, n**alpha)
    s = Fraction(n ** (k - 1) - 1, n - 1) * w
    return s, w


_REFERENCE_IDS = ("sj", "tsc", "spir")


def reference_performance(scheme_id: str, n: int, k: int) -> ReferencePerformance:
    """Stated message length, download, leakage, and key use of a baseline.

    ``sj`` is exposed for comparison only; the other two are also
    implemented as runnable schemes.
    """
    _check_system(n, k)
    if scheme_id == "sj":
        return ReferencePerformance(
            scheme="sj",
            length=Fraction(n**k),
            download=Fraction(n * (n**k - 1), n - 1),
            total_leakage=Fraction(1, n - 1) * (1 - Fraction(1, n ** (k - 1))),
            individual_leakage=Fraction(1, n ** (k - 1)),
            rho=Fraction(0),
        )
    if scheme_id == "tsc":
        return ReferencePerformance(
            scheme="tsc",
            length=Fraction(n - 1),
            download=Fraction(n**k - 1, n ** (k - 1)),
            total_leakage=Fraction(1, n - 1) * (1 - Fraction(1, n ** (k - 1))),
            individual_leakage=Fraction(1, n ** (k - 1)),
            rho=Fraction(0),
        )
    if scheme_id == "spir":
        return ReferencePerformance(
            scheme="spir",
            length=Fraction(n - 1),
            download=Fraction(n),
            total_leakage=Fraction(0),
            individual_leakage=Fraction(0),
            rho=Fraction(1, n - 1),
        )
    raise ParameterError(
        f"unknown reference scheme {scheme_id!r}; expected one of {_REFERENCE_IDS}"
    )
