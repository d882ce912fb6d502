"""q-series building blocks on top of the truncated series core.

Pochhammer products, Gaussian binomials, and the two degree-scaling
operators used to push power weights in and out of divisor sums.
"""

from __future__ import annotations

from .series import (
    Context,
    Poly,
    QSeries,
    SeriesError,
    invert,
    one,
    qpow,
    zero,
)

__all__ = [
    "pochhammer_finite",
    "pochhammer_infinite",
    "pochhammer_scaled",
    "gaussian_binomial",
    "op_d",
    "op_i",
]


def pochhammer_finite(x: QSeries, n: int) -> QSeries:
    """(x; q)_n = (1 - x)(1 - x q) ... (1 - x q^(n-1)); empty product is 1."""
    if n < 0:
        raise ValueError("pochhammer length must be >= 0")
    ctx = x.ctx
    acc = one(ctx)
    for k in range(n):
        acc = acc * (one(ctx) - x * qpow(ctx, k))
    return acc


def pochhammer_infinite(x: QSeries) -> QSeries:
    """(x; q)_inf modulo the truncation.

    Factors (1 - x q^k) with k beyond the window are congruent to 1, so the
    product stops as soon as the shifted factor can no longer touch q^N.
    """
    ctx = x.ctx
    v = x.q_valuation()
    if v is None:
        return one(ctx)
    acc = one(ctx)
    k = 0
    while k + v <= ctx.order:
        acc = acc * (one(ctx) - x * qpow(ctx, k))
        k += 1
    return acc


def pochhammer_scaled(x: QSeries, y: QSeries, n: int) -> QSeries:
    """prod_{k=0}^{n-1} (x - y q^k), i.e. (y/x; q)_n x^n without any ratio."""
    if n < 0:
        raise ValueError("pochhammer length must be >= 0")
    ctx = x.ctx
    acc = one(ctx)
    for k in range(n):
        acc = acc * (x - y * qpow(ctx, k))
    return acc


_GAUSS_CACHE: dict = {}


def gaussian_binomial(ctx: Context, n: int, r: int) -> QSeries:
    """Gaussian binomial coefficient [n r] as a q-series in the context.

    Computed from the defining quotient (q)_n / ((q)_{n-r} (q)_r); out of
    range r returns zero, matching the combinatorial convention.
    """
    if r < 0 or r > n:
        return zero(ctx)
    key = (ctx, n, r)
    hit = _GAUSS_CACHE.get(key)
    if hit is not None:
        return hit
    q_po = _euler_prefixes(ctx, n)
    inv = invert(q_po[n - r] * q_po[r])
    value = q_po[n] * inv
    if len(_GAUSS_CACHE) > 4096:
        _GAUSS_CACHE.clear()
    _GAUSS_CACHE[key] = value
    return value


def _euler_prefixes(ctx: Context, n: int):
    """[(q;q)_0, ..., (q;q)_n] with caching per context."""
    key = (ctx, "euler")
    vals = _GAUSS_CACHE.get(key)
    if vals is None:
        vals = [one(ctx)]
        _GAUSS_CACHE[key] = vals
    while len(vals) <= n:
        k = len(vals)
        vals.append(vals[-1] * (one(ctx) - qpow(ctx, k)))
    return vals


def op_d(f: QSeries, symbol: str) -> QSeries:
    """Degree-scaling operator: each monomial x^k picks up a factor k.

    This is x * d/dx, applied coefficientwise; exponents are unchanged, so
    the result stays inside the same truncation window.
    """
    ctx = f.ctx
    si = ctx.index(symbol)
    out = []
    for p in f.coeffs:
        terms = {}
        for exps, v in p.terms.items():
            e = exps[si]
            if e:
                terms[exps] = v * e
        out.append(Poly(ctx, terms))
    return QSeries(ctx, out)


def op_i(f: QSeries, symbol: str) -> QSeries:
    """Inverse degree-scaling: each monomial x^k is divided by k.

    This is the normalized antiderivative int_0^x f(u)/u du on polynomials;
    it requires every term to carry a positive power of the symbol.
    """
    ctx = f.ctx
    si = ctx.index(symbol)
    out = []
    for p in f.coeffs:
        terms = {}
        for exps, v in p.terms.items():
            e = exps[si]
            if not e:
                raise SeriesError(
                    f"term without {symbol} is not in the operator's domain"
                )
            terms[exps] = v / e
        out.append(Poly(ctx, terms))
    return QSeries(ctx, out)
