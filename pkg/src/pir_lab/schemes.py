"""The five retrieval schemes as pure, enumerable protocol objects.

A user wants message k out of K replicated q-ary messages held by N
databases without revealing k, while the information the answers carry
about the other messages stays within a budget.  Each scheme specifies

* the support of the user's private key with exact rational weights,
* the support of the databases' shared key (one symbol, or absent),
* per-database queries derived deterministically from the user key,
* per-database answers (group sums of message symbols, possibly masked),
* decoding of the answers back to the desired message row.

Index vectors are 1-based with N acting as the dummy position: a query
entry equal to N selects the implicit zero symbol appended to every
message row, so a length-(N-1) row can be addressed by indices in [1, N].
The scheme ids are:

``tsc``
    Plain interference sums.  The all-dummy query is answered with the
    empty string, which is what pulls the expected download below N.
``spir``
    Every answer additionally carries the shared key, so the user learns
    nothing beyond the requested message.
``wspir``
    Answers are masked by the sum of all message symbols instead of an
    external key; each individual unwanted message stays hidden (needs at
    least three messages).
``mixed-total`` / ``mixed-individual``
    A user-side indicator bit picks between the plain branch and the
    masked branch with a probability tuned so the averaged leakage meets
    the requested budget exactly.

Shared randomness is represented as a plain symbol value (``int``) or
``None`` when a scheme does not use it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional, Sequence

from .algebra import add_mod, cyc_sub, cyc_sum, sub_mod
from .errors import ParameterError, ProtocolError
from .tradeoff import thresholds

SCHEME_IDS = ("tsc", "spir", "wspir", "mixed-total", "mixed-individual")

Answer = tuple  # per-database answer: a (possibly empty) tuple of symbols


@dataclass(frozen=True)
class SchemeParams:
    """Scheme configuration: n databases, k messages, alphabet order q.

    ``budget`` is the leakage budget of the mixed schemes (total leakage
    for mixed-total, per-message leakage for mixed-individual) and must be
    None for the pure schemes.
    """

    scheme: str
    n: int
    k: int
    q: int
    budget: Optional[Fraction] = None


@dataclass(frozen=True)
class UserKey:
    """User-side private randomness.

    ``f0`` is the branch indicator of the mixed schemes.  ``f`` holds the
    k-1 cyclic index entries; ``f2`` is the second, independent index
    vector used only by the two-track mixed-individual scheme in its plain
    branch.
    """

    f0: Optional[int]
    f: tuple[int, ...]
    f2: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class Query:
    """Per-database query: optional indicator bit plus index vector(s)."""

    f0: Optional[int]
    vecs: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class MessageSet:
    """K x L matrix of q-ary symbols; row k-1 is message k."""

    rows: tuple[tuple[int, ...], ...]
    q: int


class Scheme:
    """Shared machinery: index-vector queries and group-sum answers."""

    scheme_id: str = ""
    has_indicator = False
    uses_shared_key = False
    num_subs = 1

    def __init__(self, params: SchemeParams):
        if params.n < 2:
            raise ParameterError(f"need at least 2 databases, got {params.n}")
        if params.k < 2:
            raise ParameterError(f"need at least 2 messages, got {params.k}")
        if params.q < 2:
            raise ParameterError(f"alphabet order must be at least 2, got {params.q}")
        self.params = params
        self.num_dbs = params.n
        self.num_msgs = params.k
        self.q = params.q
        self.width = params.n - 1  # symbols per track of a message row
        self.length = self.width * self.num_subs

    # -- supports ------------------------------------------------------

    def key_support(self) -> list[tuple[UserKey, Fraction]]:
        """Full support of the user key with exact weights summing to 1."""
        raise NotImplementedError

    def randomness_support(self) -> list[tuple[Optional[int], Fraction]]:
        """Support of the shared key: uniform symbol, or the single None."""
        if self.uses_shared_key:
            return [(value, Fraction(1, self.q)) for value in range(self.q)]
        return [(None, Fraction(1))]

    def key_usage(self, key: UserKey) -> int:
        """Shared-key symbols consumed on this key realization (0 or 1)."""
        self._check_key(key)
        return 0

    def _uniform_keys(self) -> list[tuple[UserKey, Fraction]]:
        weight = Fraction(1, self.num_dbs ** (self.num_msgs - 1))
        return [
            (UserKey(None, f), weight)
            for f in product(range(1, self.num_dbs + 1), repeat=self.num_msgs - 1)
        ]

    # -- queries ---------------------------------------------------------

    def queries(self, k: int, key: UserKey) -> tuple[Query, ...]:
        """The N per-database queries for retrieval index k under this key."""
        self._check_target(k)
        self._check_key(key)
        return tuple(self._query(k, key, db) for db in range(1, self.num_dbs + 1))

    def _query(self, k: int, key: UserKey, db: int) -> Query:
        raise NotImplementedError

    def _index_vector(self, f: tuple[int, ...], k: int, db: int) -> tuple[int, ...]:
        # Entry at position k sweeps [1, N] as db does; it equals N exactly
        # at the anchor database, whose answer carries pure interference.
        anchor = cyc_sum(f, self.num_dbs)
        entry = cyc_sub(db, anchor, self.num_dbs)
        return f[: k - 1] + (entry,) + f[k - 1 :]

    def _dual(self, vec: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(self.num_dbs + 1 - entry for entry in vec)

    # -- answers ---------------------------------------------------------

    def answer(
        self, db: int, query: Query, msgs: MessageSet, shared: Optional[int] = None
    ) -> Answer:
        """Database db's answer: a tuple of 0, 1, or 2 symbols."""
        self._check_db(db)
        self._check_query(query)
        self._check_messages(msgs)
        self._check_shared(shared)
        return self._answer(query, msgs, shared)

    def _answer(self, query: Query, msgs: MessageSet, shared: Optional[int]) -> Answer:
        raise NotImplementedError

    def _combine(self, vec: tuple[int, ...], msgs: MessageSet, sub: int) -> int:
        base = sub * self.width
        total = 0
        for row, idx in enumerate(vec):
            if idx <= self.width:
                total += msgs.rows[row][base + idx - 1]
        return total % self.q

    def _message_key(self, msgs: MessageSet) -> int:
        return sum(symbol for row in msgs.rows for symbol in row) % self.q

    def _plain_answer(self, vec: tuple[int, ...], msgs: MessageSet, sub: int) -> Answer:
        if all(entry == self.num_dbs for entry in vec):
            return ()
        return (self._combine(vec, msgs, sub),)

    def _masked_answer(
        self, vec: tuple[int, ...], msgs: MessageSet, sub: int, mask: int
    ) -> Answer:
        return (add_mod(self._combine(vec, msgs, sub), mask, self.q),)

    # -- decoding --------------------------------------------------------

    def decode(self, k: int, key: UserKey, answers: Sequence[Answer]) -> tuple[int, ...]:
        """Recover message k from all N answers; returns the full row."""
        self._check_target(k)
        self._check_key(key)
        if len(answers) != self.num_dbs:
            raise ProtocolError(
                f"expected {self.num_dbs} answers, got {len(answers)}"
            )
        return self._decode_given(k, self.queries(k, key), answers)

    def _decode_given(
        self, k: int, queries: Sequence[Query], answers: Sequence[Answer]
    ) -> tuple[int, ...]:
        split = []
        for db, (query, answer) in enumerate(zip(queries, answers), start=1):
            lens = self._sub_lengths(query)
            if sum(lens) != len(answer):
                raise ProtocolError(
                    f"database {db}: answer length {len(answer)} does not match "
                    f"the scheme's pattern {lens}"
                )
            if any(not (isinstance(v, int) and 0 <= v < self.q) for v in answer):
                raise ProtocolError(f"database {db}: answer symbols outside [0, {self.q})")
            parts, offset = [], 0
            for ln in lens:
                parts.append(answer[offset : offset + ln])
                offset += ln
            split.append(parts)
        row: list[int] = []
        for sub in range(self.num_subs):
            vecs = [query.vecs[sub] for query in queries]
            anchors = [db for db in range(1, self.num_dbs + 1) if vecs[db - 1][k - 1] == self.num_dbs]
            anchor = anchors[0]
            anchor_answer = split[anchor - 1][sub]
            base = anchor_answer[0] if anchor_answer else 0
            track = [0] * self.width
            for db in range(1, self.num_dbs + 1):
                if db == anchor:
                    continue
                position = vecs[db - 1][k - 1]
                track[position - 1] = sub_mod(split[db - 1][sub][0], base, self.q)
            row.extend(track)
        return tuple(row)

    def _sub_lengths(self, query: Query) -> tuple[int, ...]:
        plain = self._plain_branch(query)
        return tuple(
            0 if plain and all(entry == self.num_dbs for entry in vec) else 1
            for vec in query.vecs
        )

    def _plain_branch(self, query: Query) -> bool:
        return False

    # -- validation --------------------------------------------------------

    def _check_target(self, k: int) -> None:
        if not 1 <= k <= self.num_msgs:
            raise ValueError(f"retrieval index {k} outside [1, {self.num_msgs}]")

    def _check_db(self, db: int) -> None:
        if not 1 <= db <= self.num_dbs:
            raise ValueError(f"database index {db} outside [1, {self.num_dbs}]")

    def _check_vec(self, vec: tuple[int, ...], what: str) -> None:
        if len(vec) != self.num_msgs:
            raise ValueError(f"{what} must have {self.num_msgs} entries, got {len(vec)}")
        if any(not 1 <= entry <= self.num_dbs for entry in vec):
            raise ValueError(f"{what} entries must lie in [1, {self.num_dbs}]")

    def _check_key(self, key: UserKey) -> None:
        if self.has_indicator:
            if key.f0 not in (0, 1):
                raise ValueError("this scheme's key carries an indicator bit in {0, 1}")
        elif key.f0 is not None:
            raise ValueError("this scheme's key has no indicator bit")
        if len(key.f) != self.num_msgs - 1:
            raise ValueError(
                f"key must have {self.num_msgs - 1} index entries, got {len(key.f)}"
            )
        if any(not 1 <= entry <= self.num_dbs for entry in key.f):
            raise ValueError(f"key entries must lie in [1, {self.num_dbs}]")
        if self._expects_f2(key):
            if key.f2 is None or len(key.f2) != self.num_msgs - 1:
                raise ValueError("this key needs a second index vector of the same shape")
            if any(not 1 <= entry <= self.num_dbs for entry in key.f2):
                raise ValueError(f"key entries must lie in [1, {self.num_dbs}]")
        elif key.f2 is not None:
            raise ValueError("this key takes no second index vector")

    def _expects_f2(self, key: UserKey) -> bool:
        return False

    def _check_query(self, query: Query) -> None:
        if self.has_indicator:
            if query.f0 not in (0, 1):
                raise ValueError("query must carry an indicator bit in {0, 1}")
        elif query.f0 is not None:
            raise ValueError("this scheme's queries have no indicator bit")
        if len(query.vecs) != self.num_subs:
            raise ValueError(
                f"query must carry {self.num_subs} index vector(s), got {len(query.vecs)}"
            )
        for vec in query.vecs:
            self._check_vec(vec, "query vector")

    def _check_messages(self, msgs: MessageSet) -> None:
        if msgs.q != self.q:
            raise ValueError(f"message alphabet {msgs.q} does not match scheme's {self.q}")
        if len(msgs.rows) != self.num_msgs:
            raise ValueError(f"expected {self.num_msgs} message rows, got {len(msgs.rows)}")
        for row in msgs.rows:
            if len(row) != self.length:
                raise ValueError(f"message rows must have {self.length} symbols")
            if any(not 0 <= symbol < self.q for symbol in row):
                raise ValueError(f"message symbols must lie in [0, {self.q})")

    def _check_shared(self, shared: Optional[int]) -> None:
        if self.uses_shared_key:
            if shared is None or not 0 <= shared < self.q:
                raise ValueError("this scheme needs a shared key symbol in [0, q)")
        elif shared is not None:
            raise ValueError("this scheme uses no shared key")


class TscCode(Scheme):
    """Plain interference sums; leaks at the unconstrained-optimum rate."""

    scheme_id = "tsc"

    def key_support(self):
        return self._uniform_keys()

    def _query(self, k, key, db):
        return Query(None, (self._index_vector(key.f, k, db),))

    def _answer(self, query, msgs, shared):
        return self._plain_answer(query.vecs[0], msgs, 0)

    def _plain_branch(self, query):
        return True


class SpirCode(Scheme):
    """Shared-key-masked sums; the user learns nothing beyond message k."""

    scheme_id = "spir"
    uses_shared_key = True

    def key_support(self):
        return self._uniform_keys()

    def key_usage(self, key):
        self._check_key(key)
        return 1

    def _query(self, k, key, db):
        return Query(None, (self._index_vector(key.f, k, db),))

    def _answer(self, query, msgs, shared):
        return self._masked_answer(query.vecs[0], msgs, 0, shared)


class WsPirCode(Scheme):
    """Message-sum-masked sums; hides every individual unwanted message.

    Works when q >= 3, or when q = 2 with at least three databases: the
    mask then always keeps at least one symbol of some third message alive
    in every answer.
    """

    scheme_id = "wspir"

    def key_support(self):
        return self._uniform_keys()

    def _query(self, k, key, db):
        return Query(None, (self._index_vector(key.f, k, db),))

    def _answer(self, query, msgs, shared):
        return self._masked_answer(query.vecs[0], msgs, 0, self._message_key(msgs))


class WsPirPairCode(Scheme):
    """Two-track variant for the binary two-database corner (q = n = 2).

    Messages split into two single-symbol tracks sharing one message-sum
    mask.  The second track is driven by the entrywise dual of the query
    vector, so one uniform index vector serves both tracks and the query
    pair carries no information beyond its first component.
    """

    scheme_id = "wspir"
    num_subs = 2

    def key_support(self):
        return self._uniform_keys()

    def _query(self, k, key, db):
        vec = self._index_vector(key.f, k, db)
        return Query(None, (vec, self._dual(vec)))

    def _answer(self, query, msgs, shared):
        mask = self._message_key(msgs)
        return self._masked_answer(query.vecs[0], msgs, 0, mask) + self._masked_answer(
            query.vecs[1], msgs, 1, mask
        )


class MixedTotalCode(Scheme):
    """Bernoulli mixture of the plain and shared-key branches.

    The indicator probability is tuned so the averaged total leakage meets
    the budget exactly while download cost and shared-key consumption sit
    on their optimal tradeoff lines.  Also serves mixed-individual with
    two messages, where the two leakage notions coincide.
    """

    scheme_id = "mixed-total"
    has_indicator = True
    uses_shared_key = True

    def __init__(self, params: SchemeParams):
        super().__init__(params)
        n, k = params.n, params.k
        budget = Fraction(params.budget)
        self.p_leaky = Fraction(n ** (k - 1) * (n - 1), n ** (k - 1) - 1) * budget

    def key_support(self):
        out = []
        uniform = Fraction(1, self.num_dbs ** (self.num_msgs - 1))
        for f0, p_branch in ((0, self.p_leaky), (1, 1 - self.p_leaky)):
            if p_branch == 0:
                continue
            for f in product(range(1, self.num_dbs + 1), repeat=self.num_msgs - 1):
                out.append((UserKey(f0, f), p_branch * uniform))
        return out

    def key_usage(self, key):
        self._check_key(key)
        return key.f0

    def _query(self, k, key, db):
        return Query(key.f0, (self._index_vector(key.f, k, db),))

    def _answer(self, query, msgs, shared):
        if query.f0 == 0:
            return self._plain_answer(query.vecs[0], msgs, 0)
        return self._masked_answer(query.vecs[0], msgs, 0, shared)

    def _plain_branch(self, query):
        return query.f0 == 0


class MixedIndividualCode(Scheme):
    """Mixture of the plain branch and the message-sum-masked branch.

    Needs at least three messages; no external shared key is consumed in
    either branch.
    """

    scheme_id = "mixed-individual"
    has_indicator = True

    def __init__(self, params: SchemeParams):
        super().__init__(params)
        self.p_leaky = Fraction(params.budget) * params.n ** (params.k - 1)

    def key_support(self):
        out = []
        uniform = Fraction(1, self.num_dbs ** (self.num_msgs - 1))
        for f0, p_branch in ((0, self.p_leaky), (1, 1 - self.p_leaky)):
            if p_branch == 0:
                continue
            for f in product(range(1, self.num_dbs + 1), repeat=self.num_msgs - 1):
                out.append((UserKey(f0, f), p_branch * uniform))
        return out

    def _query(self, k, key, db):
        return Query(key.f0, (self._index_vector(key.f, k, db),))

    def _answer(self, query, msgs, shared):
        if query.f0 == 0:
            return self._plain_answer(query.vecs[0], msgs, 0)
        return self._masked_answer(query.vecs[0], msgs, 0, self._message_key(msgs))

    def _plain_branch(self, query):
        return query.f0 == 0


class MixedIndividualPairCode(Scheme):
    """Two-track mixture for q = n = 2 with at least three messages.

    The masked branch reuses the dual-track construction; the plain branch
    runs the two tracks with independent index vectors so the per-symbol
    leakage rate matches the single-track plain code.
    """

    scheme_id = "mixed-individual"
    has_indicator = True
    num_subs = 2

    def __init__(self, params: SchemeParams):
        super().__init__(params)
        self.p_leaky = Fraction(params.budget) * params.n ** (params.k - 1)

    def key_support(self):
        out = []
        span = range(1, self.num_dbs + 1)
        repeat = self.num_msgs - 1
        uniform = Fraction(1, self.num_dbs**repeat)
        if self.p_leaky > 0:
            for f in product(span, repeat=repeat):
                for f2 in product(span, repeat=repeat):
                    out.append((UserKey(0, f, f2), self.p_leaky * uniform * uniform))
        if self.p_leaky < 1:
            for f in product(span, repeat=repeat):
                out.append((UserKey(1, f), (1 - self.p_leaky) * uniform))
        return out

    def _expects_f2(self, key):
        return key.f0 == 0

    def _query(self, k, key, db):
        vec = self._index_vector(key.f, k, db)
        if key.f0 == 0:
            return Query(0, (vec, self._index_vector(key.f2, k, db)))
        return Query(1, (vec, self._dual(vec)))

    def _answer(self, query, msgs, shared):
        if query.f0 == 0:
            return self._plain_answer(query.vecs[0], msgs, 0) + self._plain_answer(
                query.vecs[1], msgs, 1
            )
        mask = self._message_key(msgs)
        return self._masked_answer(query.vecs[0], msgs, 0, mask) + self._masked_answer(
            query.vecs[1], msgs, 1, mask
        )

    def _plain_branch(self, query):
        return query.f0 == 0


@lru_cache(maxsize=None)
def make_scheme(params: SchemeParams) -> Scheme:
    """Validate parameters and build the matching scheme object."""
    if params.scheme not in SCHEME_IDS:
        raise ParameterError(
            f"unknown scheme {params.scheme!r}; expected one of {', '.join(SCHEME_IDS)}"
        )
    if params.scheme in ("tsc", "spir", "wspir"):
        if params.budget is not None:
            raise ParameterError(f"scheme {params.scheme!r} takes no leakage budget")
        if params.scheme == "wspir":
            if params.k < 3:
                raise ParameterError(
                    "wspir needs at least 3 messages; with 2 messages per-message "
                    "and total security coincide, use spir"
                )
            if params.q == 2 and params.n == 2:
                return WsPirPairCode(params)
            return WsPirCode(params)
        return TscCode(params) if params.scheme == "tsc" else SpirCode(params)
    if params.budget is None:
        raise ParameterError(f"scheme {params.scheme!r} requires a leakage budget")
    budget = Fraction(params.budget)
    if budget < 0:
        raise ParameterError(f"leakage budget must be nonnegative, got {budget}")
    s_t, w_t = thresholds(params.n, params.k)
    if params.scheme == "mixed-total":
        if budget > s_t:
            raise ParameterError(
                f"total-leakage budget {budget} exceeds the threshold {s_t}; budgets "
                f"beyond it cost the same as the threshold, rerun with --budget {s_t}"
            )
        return MixedTotalCode(params)
    if budget > w_t:
        raise ParameterError(
            f"per-message leakage budget {budget} exceeds the threshold {w_t}; budgets "
            f"beyond it cost the same as the threshold, rerun with --budget {w_t}"
        )
    if params.k == 2:
        return MixedTotalCode(params)
    if params.q == 2 and params.n == 2:
        return MixedIndividualPairCode(params)
    return MixedIndividualCode(params)


# Functional surface mirroring the protocol operations, for callers that
# prefer to pass parameter records around instead of scheme objects.


def key_support(params: SchemeParams) -> list[tuple[UserKey, Fraction]]:
    return make_scheme(params).key_support()


def randomness_support(params: SchemeParams) -> list[tuple[Optional[int], Fraction]]:
    return make_scheme(params).randomness_support()


def gen_queries(params: SchemeParams, k: int, fkey: UserKey) -> tuple[Query, ...]:
    return make_scheme(params).queries(k, fkey)


def gen_answer(
    params: SchemeParams,
    db: int,
    query: Query,
    msgs: MessageSet,
    shared: Optional[int] = None,
) -> Answer:
    return make_scheme(params).answer(db, query, msgs, shared)


def decode(
    params: SchemeParams, k: int, fkey: UserKey, answers: Iterable[Answer]
) -> tuple[int, ...]:
    return make_scheme(params).decode(k, fkey, list(answers))


def key_usage(params: SchemeParams, fkey: UserKey) -> int:
    return make_scheme(params).key_usage(fkey)
