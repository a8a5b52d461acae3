"""Exact rational-function expressions in named variables.

Every expression is held in a quotient normal form num/den: both sides are
multivariate polynomials with Fraction coefficients, stored as
{monomial: coefficient} dicts.  Normalization flattens sums and products,
collects identical monomials, cancels common *monomial* factors between
numerator and denominator, folds constant denominators and scales the
denominator so its leading coefficient is 1.  No polynomial GCD beyond the
monomial cancellation is attempted, so quotients are not reduced to lowest
terms in general; structural equality compares the normal forms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

# A monomial is a tuple of (variable name, exponent) pairs, sorted by name,
# exponents >= 1.  The empty tuple is the constant monomial.
Monomial = tuple
Poly = dict

_ONE_MONO: Monomial = ()


class ExprError(ValueError):
    """Malformed expression operation (bad exponent, unbound variable, ...)."""


class ZeroDenominatorError(ExprError):
    """Raised when a construction would produce a literal zero denominator."""


class PoleError(ArithmeticError):
    """Evaluation hit a numerically zero denominator.

    Carries the printed form of the vanishing denominator so reports can say
    which subexpression blew up.
    """

    def __init__(self, denominator_text: str):
        super().__init__(f"evaluation at a pole: denominator ({denominator_text}) is zero")
        self.denominator_text = denominator_text


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_sort_key(m: Monomial):
    # graded order: total degree first, then the name/exponent tuple itself.
    return (_mono_degree(m), m)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        d[name] = d.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in d.items() if e))


def _mono_div(a: Monomial, b: Monomial) -> Monomial | None:
    """a / b entrywise, or None when b does not divide a."""
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        have = d.get(name, 0) - e
        if have < 0:
            return None
        if have:
            d[name] = have
        else:
            d.pop(name, None)
    return tuple(sorted(d.items()))


def _padd(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _pneg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = _mono_mul(ma, mb)
            s = out.get(m, 0) + ca * cb
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def _pscale(a: Poly, c: Fraction) -> Poly:
    if not c:
        return {}
    return {m: k * c for m, k in a.items()}


def _pconst(c) -> Poly:
    c = Fraction(c)
    return {_ONE_MONO: c} if c else {}


_PONE = _pconst(1)


def _leading(a: Poly) -> Monomial:
    return max(a, key=_mono_sort_key)


def _pdiff(a: Poly, var: str) -> Poly:
    out: Poly = {}
    for m, c in a.items():
        d = dict(m)
        e = d.get(var, 0)
        if not e:
            continue
        if e == 1:
            d.pop(var)
        else:
            d[var] = e - 1
        mm = tuple(sorted(d.items()))
        s = out.get(mm, 0) + c * e
        if s:
            out[mm] = s
        else:
            out.pop(mm, None)
    return out


def _pdiv_exact(f: Poly, g: Poly) -> Poly | None:
    """Quotient f/g when g divides f exactly, else None.

    Plain multivariate long division against a single divisor; succeeds only
    when the remainder is zero (which is all the normal form ever needs: the
    denominators met in practice are powers of one detJ-like polynomial).
    """
    if not g:
        return None
    if not f:
        return {}
    lg = _leading(g)
    cg = g[lg]
    rem = dict(f)
    quo: Poly = {}
    while rem:
        lm = _leading(rem)
        t = _mono_div(lm, lg)
        if t is None:
            return None
        c = rem[lm] / cg
        quo[t] = quo.get(t, 0) + c
        for m, k in g.items():
            mm = _mono_mul(m, t)
            s = rem.get(mm, 0) - k * c
            if s:
                rem[mm] = s
            else:
                rem.pop(mm, None)
    return quo


def _common_monomial(polys: Iterable[Poly]) -> Monomial:
    """Entrywise-min monomial dividing every monomial of every poly."""
    acc: dict | None = None
    for p in polys:
        for m in p:
            d = dict(m)
            if acc is None:
                acc = d
            else:
                for name in list(acc):
                    e = d.get(name, 0)
                    if e < acc[name]:
                        if e:
                            acc[name] = e
                        else:
                            del acc[name]
            if not acc:
                return _ONE_MONO
    return tuple(sorted(acc.items())) if acc else _ONE_MONO


def _poly_str(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for m in sorted(p, key=_mono_sort_key, reverse=True):
        c = p[m]
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


class RatExpr:
    """Immutable rational expression in normal form."""

    __slots__ = ("num", "den", "_key")

    def __init__(self, num: Poly, den: Poly):
        # normalize in place; callers may hand in any poly pair
        if not den:
            raise ZeroDenominatorError("denominator is the zero polynomial")
        if not num:
            den = dict(_PONE)
        else:
            g = _common_monomial((num, den))
            if g:
                num = {_mono_div(m, g): c for m, c in num.items()}
                den = {_mono_div(m, g): c for m, c in den.items()}
        if len(den) == 1 and _ONE_MONO in den:
            c = den[_ONE_MONO]
            if c != 1:
                num = _pscale(num, Fraction(1) / c)
                den = dict(_PONE)
        else:
            lc = den[_leading(den)]
            if lc != 1:
                inv = Fraction(1) / lc
                num = _pscale(num, inv)
                den = _pscale(den, inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(
            self,
            "_key",
            (tuple(sorted(num.items())), tuple(sorted(den.items()))),
        )

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("RatExpr is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(c) -> "RatExpr":
        return RatExpr(_pconst(Fraction(c)), dict(_PONE))

    @staticmethod
    def var(name: str) -> "RatExpr":
        return RatExpr({((name, 1),): Fraction(1)}, dict(_PONE))

    # -- structure ----------------------------------------------------

    @property
    def is_polynomial(self) -> bool:
        return self.den == _PONE

    @property
    def is_zero(self) -> bool:
        return not self.num

    def constant_value(self) -> Fraction | None:
        """The Fraction value when the expression is a constant, else None."""
        if not self.num:
            return Fraction(0)
        if self.is_polynomial and len(self.num) == 1 and _ONE_MONO in self.num:
            return self.num[_ONE_MONO]
        return None

    def variables(self) -> set:
        out = set()
        for p in (self.num, self.den):
            for m in p:
                for name, _ in m:
                    out.add(name)
        return out

    def num_terms(self) -> list:
        return sorted(self.num.items())

    def den_terms(self) -> list:
        return sorted(self.den.items())

    # -- algebra ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatExpr):
            return other
        if isinstance(other, (int, Fraction)):
            return RatExpr.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RatExpr(_padd(self.num, o.num), dict(self.den))
        # shared-factor shortcut keeps detJ-power denominators from ballooning
        q = _pdiv_exact(o.den, self.den)
        if q is not None:
            return RatExpr(_padd(_pmul(self.num, q), o.num), dict(o.den))
        q = _pdiv_exact(self.den, o.den)
        if q is not None:
            return RatExpr(_padd(self.num, _pmul(o.num, q)), dict(self.den))
        return RatExpr(
            _padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
            _pmul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return RatExpr(_pneg(self.num), dict(self.den))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RatExpr(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise ZeroDenominatorError("division by the zero expression")
        return RatExpr(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise ExprError("exponent must be an integer literal")
        if e == 0:
            return RatExpr.const(1)
        base = self
        if e < 0:
            if not self.num:
                raise ZeroDenominatorError("zero raised to a negative power")
            base = RatExpr(dict(self.den), dict(self.num))
            e = -e
        num, den = dict(_PONE), dict(_PONE)
        for _ in range(e):
            num = _pmul(num, base.num)
            den = _pmul(den, base.den)
        return RatExpr(num, den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatExpr.const(other)
        if not isinstance(other, RatExpr):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    # -- calculus -----------------------------------------------------

    def diff(self, var: str) -> "RatExpr":
        """Plain partial derivative with respect to the named variable."""
        dn = _pdiff(self.num, var)
        if self.is_polynomial:
            return RatExpr(dn, dict(_PONE))
        dd = _pdiff(self.den, var)
        n = _padd(_pmul(dn, self.den), _pneg(_pmul(self.num, dd)))
        return RatExpr(n, _pmul(self.den, self.den))

    # -- evaluation ---------------------------------------------------

    def eval(self, env: Mapping[str, complex]) -> complex:
        try:
            dv = _poly_eval(self.den, env)
        except KeyError as e:  # pragma: no cover - defensive
            raise ExprError(f"unbound variable {e.args[0]!r}") from None
        if dv == 0:
            raise PoleError(_poly_str(self.den))
        try:
            nv = _poly_eval(self.num, env)
        except KeyError as e:
            raise ExprError(f"unbound variable {e.args[0]!r}") from None
        return nv / dv

    def compile(self, var_order: Sequence[str]) -> Callable:
        """Fast evaluator bound to a fixed variable ordering.

        Returns a callable taking an indexable of complex values (same order
        as var_order) and returning a complex number.  Raises PoleError on a
        zero denominator like eval().
        """
        idx = {n: i for i, n in enumerate(var_order)}
        missing = self.variables() - set(var_order)
        if missing:
            raise ExprError(f"unbound variables {sorted(missing)}")
        nterms = [(complex(c), tuple((idx[n], e) for n, e in m)) for m, c in self.num.items()]
        if self.is_polynomial:
            def f_poly(x):
                acc = 0j
                for c, mono in nterms:
                    v = c
                    for i, e in mono:
                        v *= x[i] ** e
                    acc += v
                return acc
            return f_poly
        dterms = [(complex(c), tuple((idx[n], e) for n, e in m)) for m, c in self.den.items()]
        den_text = _poly_str(self.den)
        def f_rat(x):
            dv = 0j
            for c, mono in dterms:
                v = c
                for i, e in mono:
                    v *= x[i] ** e
                dv += v
            if dv == 0:
                raise PoleError(den_text)
            nv = 0j
            for c, mono in nterms:
                v = c
                for i, e in mono:
                    v *= x[i] ** e
                nv += v
            return nv / dv
        return f_rat

    # -- printing -----------------------------------------------------

    def __str__(self) -> str:
        if self.is_polynomial:
            return _poly_str(self.num)
        ns = _poly_str(self.num)
        if len(self.num) > 1:
            ns = f"({ns})"
        return f"{ns}/({_poly_str(self.den)})"

    def __repr__(self) -> str:
        return f"RatExpr({self})"


def _poly_eval(p: Poly, env: Mapping[str, complex]) -> complex:
    acc = 0j
    for m, c in p.items():
        v = complex(c)
        for name, e in m:
            v *= complex(env[name]) ** e
        acc += v
    return acc


ZERO = RatExpr.const(0)
ONE = RatExpr.const(1)
