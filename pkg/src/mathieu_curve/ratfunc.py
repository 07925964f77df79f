"""Dense univariate polynomials and rational functions over exact rationals.

Small degrees only (the eigenvalue series needs degree <= ~30); plain Euclid
with Fraction coefficients is exact and fast enough here.
"""

from __future__ import annotations

from fractions import Fraction


class Poly:
    """Polynomial in one variable, dict exponent -> Fraction, zeros dropped."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        if c is None:
            c = {}
        if isinstance(c, (int, Fraction)):
            c = {0: Fraction(c)}
        self.c = {int(k): Fraction(v) for k, v in dict(c).items() if v}

    @classmethod
    def x(cls, power: int = 1, coeff=1):
        return cls({power: coeff})

    def degree(self) -> int:
        return max(self.c) if self.c else -1

    def is_zero(self) -> bool:
        return not self.c

    def leading(self) -> Fraction:
        return self.c[self.degree()] if self.c else Fraction(0)

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.c)
        for k, v in other.c.items():
            cur = out.get(k, Fraction(0)) + v
            if cur:
                out[k] = cur
            else:
                out.pop(k, None)
        return Poly(out)

    def __neg__(self):
        return Poly({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __mul__(self, other):
        other = _as_poly(other)
        out = {}
        for i, a in self.c.items():
            for j, b in other.c.items():
                k = i + j
                cur = out.get(k, Fraction(0)) + a * b
                if cur:
                    out[k] = cur
                else:
                    out.pop(k, None)
        return Poly(out)

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = dict(self.c)
        quo = {}
        d, lead = other.degree(), other.leading()
        while rem and max(rem) >= d:
            k = max(rem)
            f = rem[k] / lead
            quo[k - d] = f
            for j, v in other.c.items():
                kk = k - d + j
                cur = rem.get(kk, Fraction(0)) - f * v
                if cur:
                    rem[kk] = cur
                else:
                    rem.pop(kk, None)
        return Poly(quo), Poly(rem)

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            _, r = a.divmod(b)
            a, b = b, r
        if a.is_zero():
            return a
        lead = a.leading()
        return Poly({k: v / lead for k, v in a.c.items()})

    def eval(self, x):
        # Horner over the sparse dict
        total = 0
        prev = None
        for k in sorted(self.c, reverse=True):
            total = self.c[k] if prev is None else total * x ** (prev - k) + self.c[k]
            prev = k
        return 0 if prev is None else total * x ** prev

    def subs_x_squared(self) -> "Poly":
        """p(x) -> p(x^2) (used to move between nu and nu^2 variables)."""
        return Poly({2 * k: v for k, v in self.c.items()})

    def coeff(self, k: int) -> Fraction:
        return self.c.get(k, Fraction(0))

    def even_part_only(self) -> bool:
        return all(k % 2 == 0 for k in self.c)

    def __eq__(self, other):
        other = _as_poly(other)
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __repr__(self):
        return f"Poly({self.c!r})"

    def format(self, var: str = "nu") -> str:
        if not self.c:
            return "0"
        bits = []
        for k in sorted(self.c, reverse=True):
            v = self.c[k]
            if k == 0:
                bits.append(f"{v}")
            elif k == 1:
                bits.append(f"{v}*{var}")
            else:
                bits.append(f"{v}*{var}^{k}")
        return " + ".join(bits)


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Poly")


class RatFunc:
    """num/den over Q, auto-reduced, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num)
        den = Poly(1) if den is None else _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly(1)
        else:
            g = num.gcd(den)
            if g.degree() > 0:
                num, _ = num.divmod(g)
                den, _ = den.divmod(g)
            lead = den.leading()
            if lead != 1:
                num = num * Poly(1 / lead)
                den = den * Poly(1 / lead)
        self.num = num
        self.den = den

    def __add__(self, other):
        other = _as_rat(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        other = _as_rat(other)
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __mul__(self, other):
        other = _as_rat(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = _as_rat(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    __radd__ = __add__
    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eval(self, x):
        return self.num.eval(x) / self.den.eval(x)

    def __eq__(self, other):
        other = _as_rat(other)
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def format(self, var: str = "nu") -> str:
        if self.den == Poly(1):
            return self.num.format(var)
        return f"({self.num.format(var)}) / ({self.den.format(var)})"

    def laurent_at_infinity(self, order: int) -> dict:
        """Expansion sum c_k x^(-k)... as {power: Fraction} down to x^(deg_num-deg_den-order)."""
        if self.num.is_zero():
            return {}
        dn, dd = self.num.degree(), self.den.degree()
        lead = self.den.leading()
        # den = lead x^dd (1 + low), low = sum_{j<dd} c_j/lead x^{j-dd}
        low = {j - dd: v / lead for j, v in self.den.c.items() if j != dd}
        inv = {0: Fraction(1)}
        term = {0: Fraction(1)}
        floor = -(order + dd + max(dn - dd, 0)) - 1
        while True:
            nxt = {}
            for i, a in term.items():
                for j, b in low.items():
                    k = i + j
                    if k < floor:
                        continue
                    cur = nxt.get(k, Fraction(0)) - a * b
                    if cur:
                        nxt[k] = cur
                    else:
                        nxt.pop(k, None)
            term = nxt
            if not term:
                break
            for k, v in term.items():
                cur = inv.get(k, Fraction(0)) + v
                if cur:
                    inv[k] = cur
                else:
                    inv.pop(k, None)
        out = {}
        for i, a in self.num.c.items():
            for j, b in inv.items():
                k = i + j - dd
                if k < dn - dd - order:
                    continue
                cur = out.get(k, Fraction(0)) + a * b / lead
                if cur:
                    out[k] = cur
                else:
                    out.pop(k, None)
        return out


def _as_rat(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (int, Fraction, Poly)):
        return RatFunc(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to RatFunc")
