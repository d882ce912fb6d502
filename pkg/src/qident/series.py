"""Bigraded truncated series arithmetic with exact rational coefficients.

The working ring is Q[symbols][[q]] modulo the ideal generated by q^(N+1)
and all monomials of total symbol degree > M.  A series is dense in q
(exactly N+1 coefficients) and each coefficient is a sparse multivariate
polynomial in the declared parameter symbols.  Discarding high monomials is
a ring homomorphism, so every identity that holds for the full formal
objects holds coefficient-for-coefficient in the truncation.

All values are immutable after construction and all operations are pure, so
series may be shared freely between threads or processes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scalars import R_ONE, as_rational, is_integral, rat_str

SYMBOL_ORDER = ("a", "b", "c", "d", "z", "t")


class SeriesError(Exception):
    """Base class for series arithmetic errors."""


class ContextMismatchError(SeriesError):
    pass


class ExponentRangeError(SeriesError):
    pass


class NotAUnitError(SeriesError):
    pass


class UnknownSymbolError(SeriesError):
    pass


class SumDivergenceError(SeriesError):
    """A declared valuation bound failed to terminate a summation."""


class Context:
    """Truncation context: q-order N, total parameter degree cap M, symbols.

    Symbols are drawn from the fixed alphabet a < b < c < d < z < t and kept
    in that canonical order, which also fixes the exponent-vector layout and
    every rendering/witness ordering.
    """

    __slots__ = ("order", "pdeg", "symbols", "zero_exps", "_index")

    def __init__(self, order: int, pdeg: int = 0, symbols=()):
        if order < 0:
            raise ValueError("q truncation order must be >= 0")
        if pdeg < 0:
            raise ValueError("parameter degree cap must be >= 0")
        syms = tuple(symbols)
        for s in syms:
            if s not in SYMBOL_ORDER:
                raise UnknownSymbolError(f"unknown parameter symbol {s!r}")
        if len(set(syms)) != len(syms):
            raise ValueError("parameter symbols must be distinct")
        self.order = order
        self.pdeg = pdeg
        self.symbols = tuple(sorted(syms, key=SYMBOL_ORDER.index))
        self.zero_exps = (0,) * len(self.symbols)
        self._index = {s: i for i, s in enumerate(self.symbols)}

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbolError(
                f"symbol {symbol!r} not in context {self.symbols}"
            ) from None

    def __eq__(self, other):
        return (
            isinstance(other, Context)
            and self.order == other.order
            and self.pdeg == other.pdeg
            and self.symbols == other.symbols
        )

    def __hash__(self):
        return hash((self.order, self.pdeg, self.symbols))

    def __repr__(self):
        return f"Context(order={self.order}, pdeg={self.pdeg}, symbols={self.symbols})"


def _check_ctx(f, g):
    if f.ctx != g.ctx:
        raise ContextMismatchError(f"{f.ctx!r} vs {g.ctx!r}")


class Poly:
    """Sparse multivariate polynomial over exact rationals, total degree <= M.

    terms maps exponent tuples (one entry per context symbol) to nonzero
    rationals.  Instances are treated as immutable; all normalization (zero
    removal, degree truncation) happens at construction time.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: dict):
        self.ctx = ctx
        self.terms = terms

    @staticmethod
    def zero(ctx):
        return Poly(ctx, {})

    @staticmethod
    def const(ctx, value):
        v = as_rational(value)
        return Poly(ctx, {ctx.zero_exps: v} if v else {})

    def is_zero(self):
        return not self.terms

    def constant(self):
        """The degree-zero coefficient (the 'constant scalar')."""
        return self.terms.get(self.ctx.zero_exps, as_rational(0))

    def __add__(self, other):
        _check_ctx(self, other)
        out = dict(self.terms)
        for e, v in other.terms.items():
            s = out.get(e)
            s = v if s is None else s + v
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.ctx, out)

    def __neg__(self):
        return Poly(self.ctx, {e: -v for e, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value):
        v = as_rational(value)
        if not v:
            return Poly.zero(self.ctx)
        return Poly(self.ctx, {e: c * v for e, c in self.terms.items()})

    def __mul__(self, other):
        _check_ctx(self, other)
        out = {}
        _mul_into(out, self.terms, other.terms, self.ctx.pdeg)
        return Poly(self.ctx, out)

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.ctx == other.ctx
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ctx, tuple(sorted(self.terms.items()))))

    def sorted_terms(self):
        """Terms in canonical order: (total degree, exponent tuple)."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __str__(self):
        return render_poly(self)

    __repr__ = __str__


def _prep(terms):
    """[(exps, degree, coeff)] sorted by degree, for truncation-aware products."""
    out = [(e, sum(e), v) for e, v in terms.items()]
    out.sort(key=lambda t: t[1])
    return out


def _mul_into(acc: dict, A: dict, B: dict, pdeg: int, pa=None, pb=None):
    """acc += A*B, discarding monomials of total degree > pdeg."""
    pa = pa if pa is not None else _prep(A)
    pb = pb if pb is not None else _prep(B)
    if not pa or not pb:
        return
    if len(pa) > len(pb):
        pa, pb = pb, pa
    get = acc.get
    for ea, da, va in pa:
        limit = pdeg - da
        for eb, db, vb in pb:
            if db > limit:
                break
            key = tuple(map(sum, zip(ea, eb))) if ea or eb else ()
            cur = get(key)
            acc[key] = va * vb if cur is None else cur + va * vb
    # zero removal deferred to callers that accumulate repeatedly


def _strip_zeros(d: dict):
    dead = [k for k, v in d.items() if not v]
    for k in dead:
        del d[k]
    return d


class QSeries:
    """Truncated q-series: coeffs[k] is the Poly coefficient of q^k, k <= N."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: Context, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    def coefficient(self, k: int) -> Poly:
        return self.coeffs[k]

    def constant_scalar(self):
        """Degree-(0,0) scalar: the q^0 coefficient's constant term."""
        return self.coeffs[0].constant()

    def is_zero(self):
        return all(p.is_zero() for p in self.coeffs)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = from_scalar(self.ctx, other)
        _check_ctx(self, other)
        return QSeries(
            self.ctx, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.ctx, [-p for p in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = from_scalar(self.ctx, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + from_scalar(self.ctx, other)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        _check_ctx(self, other)
        ctx = self.ctx
        N, M = ctx.order, ctx.pdeg
        fi = [(i, _prep(p.terms)) for i, p in enumerate(self.coeffs) if p.terms]
        gj = [(j, _prep(p.terms)) for j, p in enumerate(other.coeffs) if p.terms]
        acc = [None] * (N + 1)
        for i, pa in fi:
            top = N - i
            for j, pb in gj:
                if j > top:
                    break
                tgt = acc[i + j]
                if tgt is None:
                    tgt = acc[i + j] = {}
                _mul_into(tgt, None, None, M, pa, pb)
        coeffs = [
            Poly(ctx, _strip_zeros(d)) if d else Poly.zero(ctx) for d in acc
        ]
        return QSeries(ctx, coeffs)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, value):
        v = as_rational(value)
        return QSeries(self.ctx, [p.scale(v) for p in self.coeffs])

    def __eq__(self, other):
        return (
            isinstance(other, QSeries)
            and self.ctx == other.ctx
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ctx, tuple(self.coeffs)))

    def q_valuation(self):
        """Smallest k with nonzero coefficient, or None for the zero series."""
        for k, p in enumerate(self.coeffs):
            if not p.is_zero():
                return k
        return None

    def __str__(self):
        return render_series(self)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# constructors


def zero(ctx: Context) -> QSeries:
    return QSeries(ctx, [Poly.zero(ctx) for _ in range(ctx.order + 1)])


def from_scalar(ctx: Context, value) -> QSeries:
    s = zero(ctx)
    s.coeffs[0] = Poly.const(ctx, value)
    return s


def one(ctx: Context) -> QSeries:
    return from_scalar(ctx, 1)


def monomial(ctx: Context, coeff, q_exp: int = 0, params: dict | None = None) -> QSeries:
    """coeff * (symbols^params) * q^q_exp, everything else zero.

    Exponents outside the truncation window signal a caller bug, not data,
    and raise ExponentRangeError.
    """
    if q_exp < 0 or q_exp > ctx.order:
        raise ExponentRangeError(f"q exponent {q_exp} outside 0..{ctx.order}")
    exps = list(ctx.zero_exps)
    if params:
        for sym, e in params.items():
            if e < 0:
                raise ExponentRangeError("negative parameter exponent")
            exps[ctx.index(sym)] = e
    if sum(exps) > ctx.pdeg:
        raise ExponentRangeError(
            f"parameter degree {sum(exps)} exceeds cap {ctx.pdeg}"
        )
    s = zero(ctx)
    v = as_rational(coeff)
    if v:
        s.coeffs[q_exp] = Poly(ctx, {tuple(exps): v})
    return s


def qpow(ctx: Context, k: int) -> QSeries:
    """q^k; exponents beyond the truncation order give the zero series."""
    if k > ctx.order:
        return zero(ctx)
    return monomial(ctx, 1, q_exp=k)


def sym(ctx: Context, name: str) -> QSeries:
    return monomial(ctx, 1, params={name: 1})


# ---------------------------------------------------------------------------
# ring operations beyond + - *


def invert(f: QSeries) -> QSeries:
    """Multiplicative inverse modulo the truncation.

    Requires the constant scalar u (the q^0 coefficient's degree-0 term) to
    be nonzero.  The series is split as u*(1 - h) with h of positive bigrade
    and the inverse computed by geometric expansion of (1 - h)^-1; powers of
    h die once their bigrade leaves the window, which bounds the loop.
    """
    ctx = f.ctx
    u = f.constant_scalar()
    if not u:
        raise NotAUnitError("constant scalar is zero; series is not a unit")

    total_terms = sum(len(p.terms) for p in f.coeffs)
    if total_terms <= 2:
        # u*(1 - c*q^e*mono): the geometric series is a single monomial tower
        inv_u = 1 / u
        out = from_scalar(ctx, inv_u)
        for qe, p in enumerate(f.coeffs):
            for exps, v in p.terms.items():
                if qe == 0 and not any(exps):
                    continue
                ratio = -v / u
                pd = sum(exps)
                k = 1
                acc = ratio
                cur_q, cur_e = qe, exps
                while cur_q <= ctx.order and sum(cur_e) <= ctx.pdeg:
                    tgt = out.coeffs[cur_q]
                    out.coeffs[cur_q] = tgt + Poly(ctx, {cur_e: acc * inv_u})
                    k += 1
                    acc *= ratio
                    cur_q = qe * k
                    if pd:
                        cur_e = tuple(e * k for e in exps)
                return out
        return out

    g = f.scale(1 / u)
    h = one(ctx) - g
    acc = one(ctx)
    power = h
    steps = 0
    limit = ctx.order + ctx.pdeg + 1
    while not power.is_zero():
        acc = acc + power
        power = power * h
        steps += 1
        if steps > limit:  # pragma: no cover - defensive
            raise SeriesError("geometric inversion failed to terminate")
    return acc.scale(1 / u)


def differentiate(f: QSeries, symbol: str) -> QSeries:
    """Formal partial derivative in one parameter symbol, coefficientwise."""
    ctx = f.ctx
    si = ctx.index(symbol)
    out = []
    for p in f.coeffs:
        terms = {}
        for exps, v in p.terms.items():
            e = exps[si]
            if e:
                ne = exps[:si] + (e - 1,) + exps[si + 1 :]
                cur = terms.get(ne)
                add = v * e
                terms[ne] = add if cur is None else cur + add
        out.append(Poly(ctx, _strip_zeros(terms)))
    return QSeries(ctx, out)


def substitute(f: QSeries, bindings: dict) -> QSeries:
    """Replace bound symbols by exact rationals; unbound symbols remain.

    The result lives in the reduced context (same N and M, remaining
    symbols).  Note that substitution composed with degree truncation is
    only exact when no discarded monomial could project into the kept
    window; catalog verification therefore binds parameters *before*
    expansion rather than substituting afterwards.
    """
    ctx = f.ctx
    vals = {}
    for s, v in bindings.items():
        ctx.index(s)  # raises UnknownSymbolError for stray names
        vals[s] = as_rational(v)
    keep = [s for s in ctx.symbols if s not in vals]
    nctx = Context(ctx.order, ctx.pdeg, keep)
    keep_idx = [ctx.index(s) for s in keep]
    bound_idx = [(ctx.index(s), vals[s]) for s in ctx.symbols if s in vals]
    powers = {i: {0: R_ONE} for i, _ in bound_idx}
    out = []
    for p in f.coeffs:
        terms = {}
        for exps, v in p.terms.items():
            factor = v
            for i, val in bound_idx:
                e = exps[i]
                cache = powers[i]
                if e not in cache:
                    cache[e] = val**e
                factor = factor * cache[e]
            if not factor:
                continue
            ne = tuple(exps[i] for i in keep_idx)
            cur = terms.get(ne)
            terms[ne] = factor if cur is None else cur + factor
        out.append(Poly(nctx, _strip_zeros(terms)))
    return QSeries(nctx, out)


def rename_symbols(f: QSeries, mapping: dict) -> QSeries:
    """Permute parameter symbols (e.g. swap z and c); degree-preserving."""
    ctx = f.ctx
    target = {s: mapping.get(s, s) for s in ctx.symbols}
    if sorted(target.values(), key=SYMBOL_ORDER.index) != list(ctx.symbols):
        raise UnknownSymbolError("symbol renaming must permute the context symbols")
    # position j of the new exponent tuple holds the exponent of the symbol
    # that maps onto symbol j
    inverse = {target[s]: s for s in ctx.symbols}
    src_for_pos = [ctx.index(inverse[s]) for s in ctx.symbols]
    out = []
    for p in f.coeffs:
        terms = {}
        for exps, v in p.terms.items():
            ne = tuple(exps[i] for i in src_for_pos)
            terms[ne] = v
        out.append(Poly(ctx, terms))
    return QSeries(ctx, out)


def restrict(f: QSeries, order: int | None = None, pdeg: int | None = None) -> QSeries:
    """Project onto a smaller truncation window (same symbols)."""
    ctx = f.ctx
    n = ctx.order if order is None else order
    m = ctx.pdeg if pdeg is None else pdeg
    if n > ctx.order or m > ctx.pdeg:
        raise ExponentRangeError("restrict only shrinks the window")
    nctx = Context(n, m, ctx.symbols)
    out = []
    for k in range(n + 1):
        terms = {e: v for e, v in f.coeffs[k].terms.items() if sum(e) <= m}
        out.append(Poly(nctx, terms))
    return QSeries(nctx, out)


@dataclass(frozen=True)
class Witness:
    """First point of divergence between two series."""

    q_exp: int
    exps: tuple
    monomial: str
    lhs: str
    rhs: str

    def as_dict(self):
        return {
            "q_exp": self.q_exp,
            "monomial": self.monomial,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


def equals(f: QSeries, g: QSeries):
    """Exact equality; on failure, the smallest (q-exponent, monomial) witness."""
    _check_ctx(f, g)
    for k in range(f.ctx.order + 1):
        a, b = f.coeffs[k].terms, g.coeffs[k].terms
        if a == b:
            continue
        diffs = [e for e in set(a) | set(b) if a.get(e) != b.get(e)]
        e = min(diffs, key=lambda t: (sum(t), t))
        zero_r = as_rational(0)
        return False, Witness(
            q_exp=k,
            exps=e,
            monomial=render_monomial(f.ctx, e) or "1",
            lhs=rat_str(a.get(e, zero_r)),
            rhs=rat_str(b.get(e, zero_r)),
        )
    return True, None


# ---------------------------------------------------------------------------
# summation with declared valuation bounds


def sum_family(ctx: Context, term, start: int = 1, q_val=None, p_val=None,
               guard: int = 1_000_000) -> QSeries:
    """Sum term(n) for n = start, start+1, ... using valuation lower bounds.

    q_val(n) and p_val(n) must be monotone nondecreasing lower bounds on the
    q-valuation and the minimum parameter degree of term(n); a term enters
    the sum only while both bounds sit inside the truncation window, which
    by hypothesis exhausts the sum modulo the truncation.
    """
    acc = zero(ctx)
    n = start
    produced = 0
    while True:
        if q_val is not None and q_val(n) > ctx.order:
            break
        if p_val is not None and p_val(n) > ctx.pdeg:
            break
        acc = acc + term(n)
        n += 1
        produced += 1
        if produced > guard:
            raise SumDivergenceError(
                "summation guard tripped: declared valuation bounds do not grow"
            )
    return acc


# ---------------------------------------------------------------------------
# canonical rendering


def render_monomial(ctx: Context, exps) -> str:
    parts = []
    for s, e in zip(ctx.symbols, exps):
        if e == 1:
            parts.append(s)
        elif e > 1:
            parts.append(f"{s}^{e}")
    return "*".join(parts)


def _signed(first: bool, negative: bool) -> str:
    if first:
        return "-" if negative else ""
    return " - " if negative else " + "


def render_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for exps, v in p.sorted_terms():
        neg = v < 0
        mag = -v if neg else v
        mono = render_monomial(p.ctx, exps)
        if not mono:
            body = rat_str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{rat_str(mag)}*{mono}"
        out.append(_signed(not out, neg) + body)
    return "".join(out)


def render_series(s: QSeries) -> str:
    """Inline canonical form, e.g. `1 - q + 2q^2 + (1 - a)*q^3`."""
    out = []
    for k, p in enumerate(s.coeffs):
        if p.is_zero():
            continue
        qpart = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
        items = p.sorted_terms()
        if not qpart:
            body = render_poly(p)
            neg = body.startswith("-")
            out.append(_signed(not out, neg) + body.lstrip("-"))
            continue
        if len(items) == 1:
            exps, v = items[0]
            mono = render_monomial(s.ctx, exps)
            neg = v < 0
            mag = -v if neg else v
            if not mono:
                if mag == 1:
                    body = qpart
                elif is_integral(mag):
                    body = f"{rat_str(mag)}{qpart}"
                else:
                    body = f"{rat_str(mag)}*{qpart}"
            else:
                coeff = mono if mag == 1 else f"{rat_str(mag)}*{mono}"
                body = f"{coeff}*{qpart}"
            out.append(_signed(not out, neg) + body)
        else:
            out.append(_signed(not out, False) + f"({render_poly(p)})*{qpart}")
    return "".join(out) if out else "0"
