"""Integer partitions: enumeration, restricted classes, statistics, weights.

Partitions are tuples of weakly decreasing positive parts.  Overpartitions
pair a partition with the set of part values whose first occurrence is
overlined.  All enumeration is deterministic (reverse-lexicographic) so that
golden-file tests are stable, and every weighted sum is exact rational
arithmetic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .scalars import as_rational, rational

# class tags
ALL = "all"
DISTINCT = "distinct"
OVERPARTITIONS = "overp"
PSTAR = "pstar"      # every integer in [1, largest] occurs at least once
P1STAR = "p1star"    # every integer in [smallest, largest] occurs at least once
D1 = "d1"            # only the largest part may repeat
DSTAR = "dstar"      # D1 with the largest part exactly twice and >= 3 parts

CLASSES = (ALL, DISTINCT, OVERPARTITIONS, PSTAR, P1STAR, D1, DSTAR)

# enumeration caps keep desk-scale runtimes in seconds; they are
# configuration, not constants
DEFAULT_CAPS = {
    ALL: 60,
    DISTINCT: 120,
    OVERPARTITIONS: 60,
    PSTAR: 60,
    P1STAR: 60,
    D1: 60,
    DSTAR: 60,
}


class PartitionError(Exception):
    pass


class CapExceededError(PartitionError):
    pass


class WrongClassError(PartitionError):
    pass


class UnknownWeightError(PartitionError):
    pass


class Overpartition(NamedTuple):
    parts: tuple
    overlined: frozenset  # part values whose first occurrence is overlined


@dataclass(frozen=True)
class PartitionStats:
    smallest: int
    largest: int
    count: int
    rank: int
    distinct_count: int
    multiplicity: dict
    second_smallest: int | None


@lru_cache(maxsize=None)
def partitions_of(n: int):
    """All partitions of n in reverse-lexicographic order, largest first."""
    if n == 0:
        return ((),)
    out = []
    cur = [n]
    while True:
        out.append(tuple(cur))
        # rightmost part > 1
        i = len(cur) - 1
        while i >= 0 and cur[i] == 1:
            i -= 1
        if i < 0:
            break
        rest = len(cur) - i - 1 + 1  # ones to the right plus the 1 we shave off
        cur[i] -= 1
        head = cur[: i + 1]
        cap = cur[i]
        cur = head
        while rest > 0:
            take = min(cap, rest)
            cur.append(take)
            rest -= take
    return tuple(out)


@lru_cache(maxsize=None)
def distinct_partitions_of(n: int):
    """Partitions of n into distinct parts, reverse-lexicographic order."""
    out = []

    def rec(remaining, maxpart, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        top = min(remaining, maxpart)
        for p in range(top, 0, -1):
            # the leftover must fit into distinct parts below p
            if remaining - p > (p - 1) * p // 2:
                continue
            acc.append(p)
            rec(remaining - p, p - 1, acc)
            acc.pop()

    rec(n, n, [])
    return tuple(out)


def multiplicities(parts) -> Counter:
    return Counter(parts)


def stats(parts) -> PartitionStats:
    if not parts:
        raise PartitionError("statistics need at least one part")
    mult = multiplicities(parts)
    distinct = sorted(mult)
    second = distinct[1] if len(distinct) >= 2 else None
    return PartitionStats(
        smallest=parts[-1],
        largest=parts[0],
        count=len(parts),
        rank=parts[0] - len(parts),
        distinct_count=len(distinct),
        multiplicity=dict(mult),
        second_smallest=second,
    )


def conjugate(parts):
    """Transpose of the Young diagram."""
    if isinstance(parts, Overpartition):
        raise WrongClassError("conjugation is defined for ordinary partitions")
    if not parts:
        return ()
    return tuple(
        sum(1 for p in parts if p > i) for i in range(parts[0])
    )


def is_pstar(parts) -> bool:
    mult = multiplicities(parts)
    return all(mult.get(i, 0) >= 1 for i in range(1, parts[0] + 1))


def is_p1star(parts) -> bool:
    mult = multiplicities(parts)
    return all(mult.get(i, 0) >= 1 for i in range(parts[-1], parts[0] + 1))


def is_d1(parts) -> bool:
    mult = multiplicities(parts)
    return all(m == 1 for v, m in mult.items() if v != parts[0])


def is_dstar(parts) -> bool:
    mult = multiplicities(parts)
    return is_d1(parts) and mult[parts[0]] == 2 and len(parts) >= 3


def _overpartitions_of(n: int):
    out = []
    for parts in partitions_of(n):
        values = sorted(set(parts), reverse=True)
        k = len(values)
        for mask in range(1 << k):
            marked = frozenset(values[i] for i in range(k) if mask >> i & 1)
            out.append(Overpartition(parts, marked))
    return tuple(out)


def enumerate_class(n: int, cls: str, cap: int | None = None):
    """Every partition of n in the class, each once, deterministic order."""
    if cls not in CLASSES:
        raise PartitionError(f"unknown partition class {cls!r}")
    if n < 1:
        raise PartitionError("n must be >= 1")
    limit = DEFAULT_CAPS[cls] if cap is None else cap
    if n > limit:
        raise CapExceededError(f"n={n} exceeds cap {limit} for class {cls!r}")
    if cls == DISTINCT:
        return distinct_partitions_of(n)
    if cls == OVERPARTITIONS:
        return _overpartitions_of(n)
    base = partitions_of(n)
    if cls == ALL:
        return base
    pred = {PSTAR: is_pstar, P1STAR: is_p1star, D1: is_d1, DSTAR: is_dstar}[cls]
    return tuple(p for p in base if pred(p))


# ---------------------------------------------------------------------------
# divisor oracles


@lru_cache(maxsize=None)
def divisors(n: int):
    if n < 1:
        raise PartitionError("n must be >= 1")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return tuple(small + large[::-1])


def divisor_count(n: int) -> int:
    return len(divisors(n))


def divisor_count_2mod4(n: int) -> int:
    return sum(1 for d in divisors(n) if d % 4 == 2)


def divisor_power_sum(n: int, m: int, a):
    """sum over divisors e of n of e^m * a^e, exact for any integer m."""
    a = as_rational(a)
    total = rational(0)
    for e in divisors(n):
        total += rational(e) ** m * a**e
    return total


# ---------------------------------------------------------------------------
# weights


def omega_weight(parts) -> int:
    """nu(largest) * prod_{i=1}^{largest-1} (2 nu(i) - 1) on the 1..largest class."""
    if not is_pstar(parts):
        raise WrongClassError("omega weight needs every integer in [1, largest]")
    mult = multiplicities(parts)
    w = mult[parts[0]]
    for i in range(1, parts[0]):
        w *= 2 * mult[i] - 1
    return w


def bs_weighted_sum(n: int, m: int, a):
    """Signed double sum over distinct partitions with power-and-geometric weight.

    sum_{parts distinct} (-1)^(count-1) sum_{j=1}^{smallest}
        (largest - smallest + j)^m * a^(largest - smallest + j)
    Exact rationals; negative m yields reciprocals of integer powers.
    """
    a = as_rational(a)
    apow = {}
    total = rational(0)
    for parts in distinct_partitions_of(n):
        sign = -1 if len(parts) % 2 == 0 else 1
        base = parts[0] - parts[-1]
        inner = rational(0)
        for j in range(1, parts[-1] + 1):
            k = base + j
            p = apow.get(k)
            if p is None:
                p = apow[k] = a**k
            inner += rational(k) ** m * p
        total += sign * inner
    return total


def ffw(c, n: int):
    """sum over distinct partitions of (-1)^(count-1) * (1 + c + ... + c^(smallest-1))."""
    c = as_rational(c)
    cpow = [rational(1)]
    total = rational(0)
    for parts in distinct_partitions_of(n):
        s = parts[-1]
        while len(cpow) < s:
            cpow.append(cpow[-1] * c)
        sign = -1 if len(parts) % 2 == 0 else 1
        total += sign * sum(cpow[:s])
    return total


def ffw_coefficients(n: int) -> dict:
    """The same weight kept symbolic: map c-exponent -> integer coefficient."""
    out: dict = {}
    for parts in distinct_partitions_of(n):
        sign = -1 if len(parts) % 2 == 0 else 1
        for e in range(parts[-1]):
            out[e] = out.get(e, 0) + sign
    return {e: v for e, v in out.items() if v}


def divisor_generating_poly(n: int) -> dict:
    """Map d -> 1 over the divisors of n (exponent dictionary in one symbol)."""
    return {d: 1 for d in divisors(n)}


def smallest_run_poly(n: int) -> dict:
    """Signed sum over distinct partitions of x^(largest-smallest+1)(1+...+x^(smallest-1)).

    Equals the divisor polynomial of n; the geometric factor is expanded as a
    polynomial, never via division by x - 1.
    """
    out: dict = {}
    for parts in distinct_partitions_of(n):
        sign = -1 if len(parts) % 2 == 0 else 1
        base = parts[0] - parts[-1] + 1
        for j in range(parts[-1]):
            e = base + j
            out[e] = out.get(e, 0) + sign
    return {e: v for e, v in out.items() if v}


def overpartition_count(n: int) -> int:
    return len(enumerate_class(n, OVERPARTITIONS))


def rank_count(m: int, n: int) -> int:
    """Number of partitions of n whose rank (largest - count) equals m."""
    return sum(1 for p in partitions_of(n) if p[0] - len(p) == m)


def _w_signed_smallest(parts, params):
    sign = -1 if len(parts) % 2 == 0 else 1
    return rational(sign * parts[-1])


def _w_omega(parts, params):
    return rational(omega_weight(parts))


def _w_signed_omega(parts, params):
    sign = -1 if len(parts) % 2 == 0 else 1
    return rational(sign * omega_weight(parts))


def _w_signed_second_gap(parts, params):
    st = stats(parts)
    if st.second_smallest is None:
        raise WrongClassError("second smallest part undefined")
    sign = -1 if st.count % 2 == 0 else 1
    return rational(sign * (st.second_smallest - st.smallest))


def _w_bs_power(parts, params):
    m = params["m"]
    a = as_rational(params["a"])
    sign = -1 if len(parts) % 2 == 0 else 1
    base = parts[0] - parts[-1]
    inner = rational(0)
    for j in range(1, parts[-1] + 1):
        inner += rational(base + j) ** m * a ** (base + j)
    return sign * inner


def _w_divisor_geometric(parts, params):
    """a^(largest-smallest+1) * (a^smallest - 1)/(a - 1), with the a = 1 slot
    evaluated as the limit value smallest (a polynomial identity)."""
    a = as_rational(params["a"])
    sign = -1 if len(parts) % 2 == 0 else 1
    s = parts[-1]
    geo = rational(s) if a == 1 else sum(a**j for j in range(s))
    return sign * a ** (parts[0] - s + 1) * geo


def _w_ffw(parts, params):
    c = as_rational(params["c"])
    sign = -1 if len(parts) % 2 == 0 else 1
    return sign * sum(c**j for j in range(parts[-1]))


def _w_signed_distinct_pow2(parts, params):
    sign = -1 if len(parts) % 2 == 0 else 1
    return rational(sign * 2 ** (stats(parts).distinct_count - 1))


def _w_largest_signed_pow2(parts, params):
    sign = -1 if parts[0] % 2 == 0 else 1
    return rational(sign * 2 ** (stats(parts).distinct_count - 1))


def _w_signed_odd_smallest(parts, params):
    if parts[-1] % 2 == 0:
        return rational(0)
    return rational(-1 if len(parts) % 2 == 0 else 1)


WEIGHTS = {
    "signed_smallest": _w_signed_smallest,
    "omega": _w_omega,
    "signed_omega": _w_signed_omega,
    "signed_second_gap": _w_signed_second_gap,
    "bs_power": _w_bs_power,
    "divisor_geometric": _w_divisor_geometric,
    "ffw": _w_ffw,
    "signed_distinct_pow2": _w_signed_distinct_pow2,
    "largest_signed_pow2": _w_largest_signed_pow2,
    "signed_odd_smallest": _w_signed_odd_smallest,
}


def weighted_sum(n: int, cls: str, weight: str, **params):
    """Fold a named weight over a partition class, exactly."""
    fn = WEIGHTS.get(weight)
    if fn is None:
        raise UnknownWeightError(f"unknown weight {weight!r}")
    total = rational(0)
    for parts in enumerate_class(n, cls):
        total += fn(parts, params)
    return total
