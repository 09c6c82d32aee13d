"""Exact brute-force verification engine for the retrieval schemes.

Builds the full joint distribution of (messages, user key, shared key,
transcript) with exact rational weights and measures download cost,
individual and total leakage, privacy, correctness, and shared-key usage.

Probabilities stay ``fractions.Fraction`` end to end; only the final
entropy and mutual-information values are evaluated in double precision,
with logarithms taken base q.  Enumeration order is fixed (messages in
lexicographic symbol order, then user keys, then shared-key values), so
every derived artifact is byte-deterministic.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional

from .errors import StateCapError, VerificationError
from .schemes import (
    MessageSet,
    Query,
    Scheme,
    SchemeParams,
    UserKey,
    make_scheme,
)
from .tradeoff import (
    d_min_individual,
    d_min_total,
    reference_performance,
    rho_min_individual,
    rho_min_total,
    thresholds,
)

DEFAULT_STATE_CAP = 10**8

# Float comparisons against closed forms: entropies are exact up to the
# final logarithms, so 1e-9 absorbs all accumulation error; exact-zero
# claims get the tighter bound.
LEAK_TOL = 1e-9
ZERO_LEAK_TOL = 1e-12


class ExactDist:
    """A finite probability distribution with exact rational weights.

    Keys may be any hashable values (canonical byte strings in practice).
    Weights must all be positive and sum to exactly 1.
    """

    __slots__ = ("_weights",)

    def __init__(self, weights: Mapping):
        items = {}
        total = Fraction(0)
        for key, value in weights.items():
            p = Fraction(value)
            if p <= 0:
                raise ValueError(f"weight for {key!r} must be positive, got {p}")
            items[key] = p
            total += p
        if total != 1:
            raise ValueError(f"weights sum to {total}, expected exactly 1")
        self._weights = items

    def items(self):
        return self._weights.items()

    def __getitem__(self, key):
        return self._weights[key]

    def __contains__(self, key):
        return key in self._weights

    def __len__(self):
        return len(self._weights)

    def marginal(self, position: int) -> "ExactDist":
        """Marginal over one coordinate of tuple-valued keys."""
        out: dict = {}
        for key, p in self._weights.items():
            part = key[position]
            out[part] = out.get(part, Fraction(0)) + p
        return ExactDist(out)


def entropy(dist: ExactDist, base: int) -> float:
    """Shannon entropy of ``dist`` in log-``base`` units.

    Parameters
    ----------
    dist : ExactDist
        The distribution; weights are exact rationals.
    base : int
        Logarithm base (the alphabet order q).
    """
    log_base = math.log(base)
    return -sum(float(p) * math.log(p) for _, p in dist.items()) / log_base


def mutual_information(joint: ExactDist, base: int) -> float:
    """I(X; T) from a joint distribution keyed by (x, t) pairs.

    Computed as H(X) + H(T) - H(X, T).  Values inside the float-noise band
    just below zero are clamped to 0.0.
    """
    h_first = entropy(joint.marginal(0), base)
    h_second = entropy(joint.marginal(1), base)
    h_joint = entropy(joint, base)
    value = h_first + h_second - h_joint
    if -1e-12 < value < 0.0:
        return 0.0
    return value


# ---------------------------------------------------------------------------
# Canonical encodings.
# ---------------------------------------------------------------------------


def _pack(values) -> bytes:
    return struct.pack(f"<{len(values)}H", *values)


def _key_components(key: UserKey) -> tuple[int, ...]:
    parts: tuple[int, ...] = ()
    if key.f0 is not None:
        parts += (key.f0,)
    parts += key.f
    if key.f2 is not None:
        parts += key.f2
    return parts


def _query_components(query: Query) -> tuple[int, ...]:
    parts: tuple[int, ...] = ()
    if query.f0 is not None:
        parts += (query.f0,)
    for vec in query.vecs:
        parts += vec
    return parts


def encode_transcript(key: UserKey, queries, answers) -> bytes:
    """Canonical byte encoding of the user's full view.

    Components, each an unsigned 16-bit little-endian integer: the
    indicator bit when present, the key's index entries, then per database
    the query entries, the answer length, and the answer symbols.
    """
    parts = list(_key_components(key))
    for query, answer in zip(queries, answers):
        parts.extend(_query_components(query))
        parts.append(len(answer))
        parts.extend(answer)
    return _pack(parts)


# ---------------------------------------------------------------------------
# Joint-state enumeration.
# ---------------------------------------------------------------------------


def _as_scheme(target) -> Scheme:
    if isinstance(target, Scheme):
        return target
    if isinstance(target, SchemeParams):
        return make_scheme(target)
    raise TypeError(f"expected SchemeParams or Scheme, got {type(target).__name__}")


def state_count(target) -> int:
    """Exact number of joint states: q^(K*L) * |keys| * |shared values|."""
    scheme = _as_scheme(target)
    return (
        scheme.q ** (scheme.num_msgs * scheme.length)
        * len(scheme.key_support())
        * len(scheme.randomness_support())
    )


def _rows_from_index(index: int, num_msgs: int, length: int, q: int):
    total = num_msgs * length
    symbols = [0] * total
    for position in range(total - 1, -1, -1):
        index, symbols[position] = divmod(index, q)
    return tuple(tuple(symbols[i * length : (i + 1) * length]) for i in range(num_msgs))


def enumerate_joint(
    target, k: int, cap: int = DEFAULT_STATE_CAP
) -> Iterator[tuple[MessageSet, UserKey, Optional[int], bytes, Fraction]]:
    """Iterate the exact product distribution over (messages, key, shared key).

    Each item is (messages, user key, shared value, transcript bytes,
    probability); probabilities are exact and sum to 1 over the iteration.
    Raises StateCapError immediately if the state count exceeds ``cap``.
    """
    scheme = _as_scheme(target)
    required = state_count(scheme)
    if required > cap:
        raise StateCapError(required, cap)
    scheme._check_target(k)
    keys = scheme.key_support()
    rand = scheme.randomness_support()
    cached = [(key, weight, scheme.queries(k, key)) for key, weight in keys]
    return _iterate_joint(scheme, cached, rand)


def _iterate_joint(scheme: Scheme, cached, rand):
    num_messages = scheme.q ** (scheme.num_msgs * scheme.length)
    msg_weight = Fraction(1, num_messages)
    for index in range(num_messages):
        rows = _rows_from_index(index, scheme.num_msgs, scheme.length, scheme.q)
        msgs = MessageSet(rows, scheme.q)
        for key, key_weight, queries in cached:
            for shared, shared_weight in rand:
                answers = tuple(
                    scheme._answer(query, msgs, shared) for query in queries
                )
                transcript = encode_transcript(key, queries, answers)
                yield msgs, key, shared, transcript, msg_weight * key_weight * shared_weight


# ---------------------------------------------------------------------------
# Tallies.
# ---------------------------------------------------------------------------


class _Tally:
    __slots__ = ("download", "correct", "joint_total", "joint_single", "views")

    def __init__(self, num_msgs: int, k: int, num_dbs: int):
        self.download = Fraction(0)
        self.correct = True
        self.joint_total: dict = {}
        self.joint_single = {j: {} for j in range(1, num_msgs + 1) if j != k}
        self.views = {db: {} for db in range(1, num_dbs + 1)}


def _merge_counts(dst: dict, src: dict) -> None:
    for key, value in src.items():
        if key in dst:
            dst[key] += value
        else:
            dst[key] = value


def _merge_tally(dst: _Tally, src: _Tally) -> None:
    dst.download += src.download
    dst.correct = dst.correct and src.correct
    _merge_counts(dst.joint_total, src.joint_total)
    for j, counts in src.joint_single.items():
        _merge_counts(dst.joint_single[j], counts)
    for db, counts in src.views.items():
        _merge_counts(dst.views[db], counts)


def _chunk_tally(scheme: Scheme, k: int, key_cache, rand, start: int, stop: int) -> _Tally:
    num_msgs, num_dbs, length, q = scheme.num_msgs, scheme.num_dbs, scheme.length, scheme.q
    tally = _Tally(num_msgs, k, num_dbs)
    msg_weight = Fraction(1, q ** (num_msgs * length))
    for index in range(start, stop):
        rows = _rows_from_index(index, num_msgs, length, q)
        msgs = MessageSet(rows, q)
        flat = tuple(symbol for row in rows for symbol in row)
        row_bytes = tuple(_pack(row) for row in rows)
        others = b"".join(row_bytes[j] for j in range(num_msgs) if j != k - 1)
        target_row = rows[k - 1]
        for key, key_weight, queries, query_ints in key_cache:
            for shared, shared_weight in rand:
                p = msg_weight * key_weight * shared_weight
                shared_part = (0,) if shared is None else (1, shared)
                answers = tuple(
                    scheme._answer(query, msgs, shared) for query in queries
                )
                transcript = encode_transcript(key, queries, answers)
                if scheme._decode_given(k, queries, answers) != target_row:
                    tally.correct = False
                tally.download += p * sum(len(answer) for answer in answers)
                pair = (others, transcript)
                if pair in tally.joint_total:
                    tally.joint_total[pair] += p
                else:
                    tally.joint_total[pair] = p
                for j, counts in tally.joint_single.items():
                    pair = (row_bytes[j - 1], transcript)
                    if pair in counts:
                        counts[pair] += p
                    else:
                        counts[pair] = p
                for db in range(1, num_dbs + 1):
                    view = _pack(
                        query_ints[db - 1]
                        + (len(answers[db - 1]),)
                        + answers[db - 1]
                        + flat
                        + shared_part
                    )
                    counts = tally.views[db]
                    if view in counts:
                        counts[view] += p
                    else:
                        counts[view] = p
    return tally


def _tally_for_k(scheme: Scheme, k: int, keys, rand, threads: int) -> _Tally:
    key_cache = []
    for key, weight in keys:
        queries = scheme.queries(k, key)
        query_ints = tuple(_query_components(query) for query in queries)
        key_cache.append((key, weight, queries, query_ints))
    num_messages = scheme.q ** (scheme.num_msgs * scheme.length)
    if threads <= 1 or num_messages < 2 * threads:
        return _chunk_tally(scheme, k, key_cache, rand, 0, num_messages)
    step = -(-num_messages // threads)
    bounds = [
        (start, min(start + step, num_messages))
        for start in range(0, num_messages, step)
    ]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(_chunk_tally, scheme, k, key_cache, rand, start, stop)
            for start, stop in bounds
        ]
        merged = futures[0].result()
        for future in futures[1:]:
            _merge_tally(merged, future.result())
    return merged


# ---------------------------------------------------------------------------
# Reports.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _TheoryTargets:
    download: Fraction
    rho: Fraction
    budget: Fraction
    individual_target: Optional[Fraction]
    kind: str  # "total" or "individual"


def theoretical_targets(scheme: Scheme) -> _TheoryTargets:
    """Closed-form targets the audited scheme is expected to hit."""
    n, k = scheme.num_dbs, scheme.num_msgs
    length = scheme.length
    scheme_id = scheme.params.scheme
    s_t, w_t = thresholds(n, k)
    if scheme_id == "tsc":
        ref = reference_performance("tsc", n, k)
        return _TheoryTargets(ref.download, Fraction(0), s_t, w_t, "total")
    if scheme_id == "spir":
        ref = reference_performance("spir", n, k)
        return _TheoryTargets(ref.download, ref.rho, Fraction(0), Fraction(0), "total")
    if scheme_id == "wspir":
        point = d_min_individual(n, k, length, Fraction(0), rho=Fraction(1))
        return _TheoryTargets(point.d_min, Fraction(0), Fraction(0), Fraction(0), "individual")
    budget = Fraction(scheme.params.budget)
    if scheme_id == "mixed-total":
        point = d_min_total(n, k, length, budget, rho=Fraction(1))
        return _TheoryTargets(point.d_min, rho_min_total(n, k, budget), budget, None, "total")
    point = d_min_individual(n, k, length, budget, rho=Fraction(1))
    return _TheoryTargets(
        point.d_min, rho_min_individual(n, k, budget), budget, budget, "individual"
    )


@dataclass(frozen=True)
class AuditReport:
    """Achieved versus theoretical behavior of one scheme instance."""

    scheme: str
    n: int
    k: int
    q: int
    length: int
    budget: Optional[Fraction]
    state_count: int
    download_achieved: Fraction
    download_theory: Fraction
    individual_leakage: tuple[float, ...]
    total_leakage: float
    leakage_budget: Fraction
    individual_target: Optional[Fraction]
    leak_kind: str
    rho_achieved: Fraction
    rho_theory: Fraction
    rho_entropy: Fraction
    privacy_exact: bool
    correctness: bool
    retrieval_index: Optional[int] = None

    def matches_theory(self) -> bool:
        """True when every audited quantity hits its closed-form target."""
        if not (self.privacy_exact and self.correctness):
            return False
        if self.download_achieved != self.download_theory:
            return False
        if self.rho_achieved != self.rho_theory:
            return False
        budget = float(self.leakage_budget)
        tolerance = ZERO_LEAK_TOL if self.leakage_budget == 0 else LEAK_TOL
        native = (
            self.total_leakage
            if self.leak_kind == "total"
            else max(self.individual_leakage)
        )
        if abs(native - budget) > tolerance:
            return False
        if self.individual_target is not None:
            target = float(self.individual_target)
            tolerance = ZERO_LEAK_TOL if self.individual_target == 0 else LEAK_TOL
            if any(abs(value - target) > tolerance for value in self.individual_leakage):
                return False
        return True

    def to_json_dict(self) -> dict:
        return {
            "params": {
                "scheme": self.scheme,
                "n": self.n,
                "k": self.k,
                "q": self.q,
                "budget": None if self.budget is None else format_fraction(self.budget),
                "length": self.length,
            },
            "state_count": self.state_count,
            "download_cost": {
                "achieved": format_fraction(self.download_achieved),
                "theoretical": format_fraction(self.download_theory),
            },
            "leakage": {
                "individual_per_message": [format_real(v) for v in self.individual_leakage],
                "total_normalized": format_real(self.total_leakage),
                "budget": format_fraction(self.leakage_budget),
            },
            "rho": {
                "achieved": format_fraction(self.rho_achieved),
                "theoretical": format_fraction(self.rho_theory),
                "entropy": format_fraction(self.rho_entropy),
            },
            "privacy_exact": self.privacy_exact,
            "correctness": self.correctness,
        }


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_real(value: float) -> str:
    return format(float(value), ".12g")


def audit_scheme(
    target,
    k: Optional[int] = None,
    cap: int = DEFAULT_STATE_CAP,
    threads: int = 1,
) -> AuditReport:
    """Exhaustively audit a scheme instance against its closed forms.

    Leakage is measured for every retrieval index; the report carries the
    worst case unless ``k`` pins a single index.  Privacy is always the
    exact equality of the per-database view distributions across all
    retrieval indices, and correctness requires decoding to succeed on
    every support point.
    """
    scheme = _as_scheme(target)
    if k is not None:
        scheme._check_target(k)
    required = state_count(scheme)
    if required > cap:
        raise StateCapError(required, cap)
    keys = scheme.key_support()
    rand = scheme.randomness_support()
    base = scheme.q
    length = scheme.length

    tallies = {
        kk: _tally_for_k(scheme, kk, keys, rand, threads)
        for kk in range(1, scheme.num_msgs + 1)
    }

    downloads = {tally.download for tally in tallies.values()}
    if len(downloads) != 1:
        raise VerificationError("download cost varies with the retrieval index")
    download_achieved = tallies[1].download

    privacy = True
    for db in range(1, scheme.num_dbs + 1):
        reference = tallies[1].views[db]
        if any(tallies[kk].views[db] != reference for kk in tallies):
            privacy = False
            break

    correctness = all(tally.correct for tally in tallies.values())

    totals: dict[int, float] = {}
    singles: dict[int, tuple[float, ...]] = {}
    for kk, tally in tallies.items():
        totals[kk] = mutual_information(ExactDist(tally.joint_total), base) / length
        singles[kk] = tuple(
            mutual_information(ExactDist(tally.joint_single[j]), base) / length
            for j in sorted(tally.joint_single)
        )

    if k is not None:
        total_leakage = totals[k]
        individual = singles[k]
    else:
        total_leakage = max(totals.values())
        worst = 1
        for kk in sorted(singles):
            if max(singles[kk]) > max(singles[worst]):
                worst = kk
        individual = singles[worst]

    rho_achieved = (
        sum((weight * scheme.key_usage(key) for key, weight in keys), Fraction(0))
        / length
    )
    rho_entropy = Fraction(1, length) if scheme.uses_shared_key else Fraction(0)

    theory = theoretical_targets(scheme)
    return AuditReport(
        scheme=scheme.params.scheme,
        n=scheme.num_dbs,
        k=scheme.num_msgs,
        q=scheme.q,
        length=length,
        budget=scheme.params.budget,
        state_count=required,
        download_achieved=download_achieved,
        download_theory=theory.download,
        individual_leakage=individual,
        total_leakage=total_leakage,
        leakage_budget=theory.budget,
        individual_target=theory.individual_target,
        leak_kind=theory.kind,
        rho_achieved=rho_achieved,
        rho_theory=theory.rho,
        rho_entropy=rho_entropy,
        privacy_exact=privacy,
        correctness=correctness,
        retrieval_index=k,
    )
