"""Exact rational series arithmetic.

Everything in this module is exact: coefficients are arbitrary-precision
rationals (`fractions.Fraction`), truncation orders are tracked pessimistically,
and no operation ever rounds.  Three expansion variables are supported:

* ``U``     -- u = (2w)^(-1/2); integer u-powers encode half-integer powers of 2w
* ``SIGMA`` -- sigma = w - 1
* ``NU``    -- powers of the Floquet exponent nu (used for reversion output)

An `AsymptoticSeries` is a finite sum of terms  coeff * v^n * (ln v)^p with
p in {0, 1}; an `EpsilonSeries` is a finite sum of eps-powers with
`AsymptoticSeries` coefficients, all in one variable.
"""

from __future__ import annotations

import json
from fractions import Fraction

Rational = Fraction

U = "U"
SIGMA = "SIGMA"
NU = "NU"
VARIABLES = frozenset({U, SIGMA, NU})


class LogCapError(ValueError):
    """A product would exceed log-power 1."""


class TruncationError(ValueError):
    """An operation would consume more series terms than are known."""


class SingularMatrixError(ValueError):
    """Exact linear solve met a singular matrix."""


class ReversionError(ValueError):
    """Series reversion precondition violated."""


def rational_to_str(r: Rational) -> str:
    return str(Fraction(r))


def rational_from_str(s: str) -> Rational:
    return Fraction(s)


class GaussianRational:
    """Exact complex rational a + b*i."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _as_gaussian(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gaussian(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = _as_gaussian(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gaussian(other)
        n2 = other.re * other.re + other.im * other.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n2,
            (self.im * other.re - self.re * other.im) / n2,
        )

    def __eq__(self, other):
        try:
            other = _as_gaussian(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


GAUSSIAN_I = GaussianRational(0, 1)


def _as_gaussian(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


class AsymptoticSeries:
    """Truncated expansion sum_{n,p} c_{n,p} v^n (ln v)^p, exponents <= truncation known.

    Terms beyond `truncation_order` are unknown, not zero; every arithmetic
    operation propagates the smallest honest truncation.
    """

    __slots__ = ("variable", "terms", "truncation_order")

    def __init__(self, variable: str, terms, truncation_order: int):
        if variable not in VARIABLES:
            raise ValueError(f"unknown variable tag {variable!r}")
        clean = {}
        for (n, p), c in dict(terms).items():
            if p not in (0, 1):
                raise LogCapError(f"log power {p} outside {{0,1}}")
            c = Fraction(c)
            if c and n <= truncation_order:
                clean[(int(n), int(p))] = c
        self.variable = variable
        self.terms = clean
        self.truncation_order = int(truncation_order)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, variable: str, truncation_order: int):
        return cls(variable, {}, truncation_order)

    @classmethod
    def monomial(cls, variable: str, coeff, exponent: int, truncation_order: int, logpow: int = 0):
        return cls(variable, {(exponent, logpow): Fraction(coeff)}, truncation_order)

    # -- inspection -----------------------------------------------------------

    def coeff(self, exponent: int, logpow: int = 0) -> Rational:
        if exponent > self.truncation_order:
            raise TruncationError(
                f"coefficient of exponent {exponent} beyond truncation {self.truncation_order}"
            )
        return self.terms.get((exponent, logpow), Fraction(0))

    def valuation(self):
        """Smallest stored exponent, or None for the zero series."""
        if not self.terms:
            return None
        return min(n for (n, _p) in self.terms)

    def has_logs(self) -> bool:
        return any(p == 1 for (_n, p) in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- ring operations ------------------------------------------------------

    def _check_same_variable(self, other):
        if self.variable != other.variable:
            raise ValueError(
                f"variable mismatch: {self.variable} vs {other.variable}"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AsymptoticSeries.monomial(self.variable, other, 0, self.truncation_order)
        self._check_same_variable(other)
        trunc = min(self.truncation_order, other.truncation_order)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return AsymptoticSeries(self.variable, terms, trunc)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AsymptoticSeries.monomial(self.variable, other, 0, self.truncation_order)
        return self + (-other)

    def scale(self, c) -> "AsymptoticSeries":
        c = Fraction(c)
        return AsymptoticSeries(
            self.variable, {k: c * v for k, v in self.terms.items()}, self.truncation_order
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_same_variable(other)
        va, vb = self.valuation(), other.valuation()
        if va is None or vb is None:
            # zero series: truncation window still shifts by the known valuation
            if va is None and vb is None:
                trunc = min(self.truncation_order, other.truncation_order)
            elif va is None:
                trunc = self.truncation_order + vb
            else:
                trunc = other.truncation_order + va
            return AsymptoticSeries.zero(self.variable, trunc)
        trunc = min(self.truncation_order + vb, other.truncation_order + va)
        terms = {}
        for (n1, p1), c1 in self.terms.items():
            for (n2, p2), c2 in other.terms.items():
                p = p1 + p2
                if p > 1:
                    raise LogCapError("product of two log-bearing terms exceeds log cap")
                n = n1 + n2
                if n > trunc:
                    continue
                key = (n, p)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return AsymptoticSeries(self.variable, terms, trunc)

    __rmul__ = __mul__

    def shift(self, k: int) -> "AsymptoticSeries":
        """Multiply by v^k exactly (window shifts with the terms)."""
        return AsymptoticSeries(
            self.variable,
            {(n + k, p): c for (n, p), c in self.terms.items()},
            self.truncation_order + k,
        )

    def truncate(self, order: int) -> "AsymptoticSeries":
        if order > self.truncation_order:
            raise TruncationError(
                f"cannot extend truncation {self.truncation_order} to {order}"
            )
        return AsymptoticSeries(
            self.variable,
            {k: c for k, c in self.terms.items() if k[0] <= order},
            order,
        )

    def diff_w(self) -> "AsymptoticSeries":
        """d/dw.  U-variable: d_w = -u^3 d_u with ln(2w) = -2 ln u; SIGMA: d_w = d_sigma."""
        terms = {}
        if self.variable == U:
            trunc = self.truncation_order + 2
            for (n, p), c in self.terms.items():
                if p == 0:
                    if n:
                        _accum(terms, (n + 2, 0), -n * c)
                else:
                    # d_w(u^n L) = -n u^{n+2} L + 2 u^{n+2},  L = ln 2w
                    if n:
                        _accum(terms, (n + 2, 1), -n * c)
                    _accum(terms, (n + 2, 0), 2 * c)
        elif self.variable == SIGMA:
            trunc = self.truncation_order - 1
            for (n, p), c in self.terms.items():
                if p == 0:
                    if n:
                        _accum(terms, (n - 1, 0), n * c)
                else:
                    # d_w(s^n ln s) = n s^{n-1} ln s + s^{n-1}
                    if n:
                        _accum(terms, (n - 1, 1), n * c)
                    _accum(terms, (n - 1, 0), c)
        else:
            raise ValueError("cannot differentiate a NU-variable series in w")
        return AsymptoticSeries(self.variable, terms, trunc)

    def __eq__(self, other):
        if not isinstance(other, AsymptoticSeries):
            return NotImplemented
        return (
            self.variable == other.variable
            and self.terms == other.terms
            and self.truncation_order == other.truncation_order
        )

    def __hash__(self):
        return hash((self.variable, frozenset(self.terms.items()), self.truncation_order))

    # -- evaluation and I/O -----------------------------------------------------

    def evaluate(self, value, log_value=None):
        """Numeric sum of stored terms at v=value (log_value = ln v if logs present)."""
        total = 0.0
        for (n, p), c in sorted(self.terms.items()):
            t = float(c) * value ** n
            if p:
                if log_value is None:
                    raise ValueError("series has log terms; pass log_value")
                t *= log_value
            total += t
        return total

    def last_term_magnitude(self, value) -> float:
        """|largest-exponent stored term| at v=value; crude truncation-error gauge."""
        if not self.terms:
            return 0.0
        n = max(k[0] for k in self.terms)
        return abs(
            sum(float(c) * value ** n for (m, _p), c in self.terms.items() if m == n)
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_dict(self) -> dict:
        return {
            "var": self.variable,
            "terms": [
                {"pow": n, "log": p, "coeff": rational_to_str(c)}
                for (n, p), c in sorted(self.terms.items())
            ],
            "trunc": self.truncation_order,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AsymptoticSeries":
        return cls(
            d["var"],
            {(t["pow"], t["log"]): rational_from_str(t["coeff"]) for t in d["terms"]},
            d["trunc"],
        )

    @classmethod
    def from_json(cls, s: str) -> "AsymptoticSeries":
        return cls.from_dict(json.loads(s))

    def __repr__(self):
        return f"AsymptoticSeries({self.variable}, {len(self.terms)} terms, trunc={self.truncation_order})"

    def __str__(self):
        if not self.terms:
            return "0"
        sym = {U: "u", SIGMA: "s", NU: "nu"}[self.variable]
        bits = []
        for (n, p), c in sorted(self.terms.items()):
            piece = f"{c}"
            if n:
                piece += f"*{sym}^{n}"
            if p:
                piece += f"*ln({sym})"
            bits.append(piece)
        return " + ".join(bits)


def _accum(d, key, val):
    cur = d.get(key, Fraction(0)) + val
    if cur:
        d[key] = cur
    else:
        d.pop(key, None)


def series_add(a: AsymptoticSeries, b: AsymptoticSeries) -> AsymptoticSeries:
    return a + b


def series_mul(a: AsymptoticSeries, b: AsymptoticSeries) -> AsymptoticSeries:
    return a * b


def series_diff_w(a: AsymptoticSeries) -> AsymptoticSeries:
    return a.diff_w()


class EpsilonSeries:
    """Finite sum over eps-powers of AsymptoticSeries rows, all in one variable."""

    __slots__ = ("terms", "truncation_eps")

    def __init__(self, terms, truncation_eps: int):
        clean = {}
        var = None
        for e, s in dict(terms).items():
            if not isinstance(s, AsymptoticSeries):
                raise TypeError("EpsilonSeries rows must be AsymptoticSeries")
            if var is None:
                var = s.variable
            elif s.variable != var:
                raise ValueError("EpsilonSeries rows must share one variable")
            if e <= truncation_eps:
                clean[int(e)] = s
        self.terms = clean
        self.truncation_eps = int(truncation_eps)

    @property
    def variable(self):
        for s in self.terms.values():
            return s.variable
        return None

    def row(self, eps_power: int) -> AsymptoticSeries:
        if eps_power > self.truncation_eps:
            raise TruncationError(f"row {eps_power} beyond eps truncation {self.truncation_eps}")
        if eps_power in self.terms:
            return self.terms[eps_power]
        var = self.variable or U
        trunc = max((s.truncation_order for s in self.terms.values()), default=0)
        return AsymptoticSeries.zero(var, trunc)

    def eps_powers(self):
        return sorted(self.terms)

    def __add__(self, other):
        trunc = min(self.truncation_eps, other.truncation_eps)
        terms = dict(self.terms)
        for e, s in other.terms.items():
            terms[e] = terms[e] + s if e in terms else s
        return EpsilonSeries(terms, trunc)

    def scale(self, c) -> "EpsilonSeries":
        return EpsilonSeries({e: s.scale(c) for e, s in self.terms.items()}, self.truncation_eps)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def shift_eps(self, k: int) -> "EpsilonSeries":
        return EpsilonSeries(
            {e + k: s for e, s in self.terms.items()}, self.truncation_eps + k
        )

    def __mul__(self, other: "EpsilonSeries") -> "EpsilonSeries":
        if not self.terms or not other.terms:
            return EpsilonSeries({}, min(self.truncation_eps, other.truncation_eps))
        va = min(self.terms)
        vb = min(other.terms)
        trunc = min(self.truncation_eps + vb, other.truncation_eps + va)
        rows = {}
        for e1, s1 in self.terms.items():
            for e2, s2 in other.terms.items():
                e = e1 + e2
                if e > trunc:
                    continue
                prod = s1 * s2
                rows[e] = rows[e] + prod if e in rows else prod
        return EpsilonSeries(rows, trunc)

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.terms.values())

    def __eq__(self, other):
        if not isinstance(other, EpsilonSeries):
            return NotImplemented
        a = {e: s for e, s in self.terms.items() if not s.is_zero()}
        b = {e: s for e, s in other.terms.items() if not s.is_zero()}
        return a == b and self.truncation_eps == other.truncation_eps

    def evaluate(self, var_value, eps_value):
        return sum(
            float(eps_value) ** e * s.evaluate(var_value) for e, s in self.terms.items()
        )

    def to_dict(self) -> dict:
        return {
            "trunc_eps": self.truncation_eps,
            "rows": {str(e): s.to_dict() for e, s in sorted(self.terms.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "EpsilonSeries":
        return cls(
            {int(e): AsymptoticSeries.from_dict(sd) for e, sd in d["rows"].items()},
            d["trunc_eps"],
        )

    @classmethod
    def from_json(cls, s: str) -> "EpsilonSeries":
        return cls.from_dict(json.loads(s))

    def __repr__(self):
        return f"EpsilonSeries(rows={self.eps_powers()}, trunc_eps={self.truncation_eps})"


# ---------------------------------------------------------------------------
# reversion
# ---------------------------------------------------------------------------
#
# Internal bivariate exact series: dict {(nu_pow, eps_pow): Fraction} with a
# floor on nu powers and a cap on eps powers.  The reversion iterates a
# constant-slope Newton update and certifies itself by substituting the result
# back and checking that the residual lies entirely outside the claimed window.

def _bi_add(a, b):
    r = dict(a)
    for k, v in b.items():
        cur = r.get(k, Fraction(0)) + v
        if cur:
            r[k] = cur
        else:
            r.pop(k, None)
    return r


def _bi_scale(a, c):
    c = Fraction(c)
    return {k: c * v for k, v in a.items() if c * v}


def _bi_mul(a, b, eps_max, nu_min):
    r = {}
    for (n1, e1), v1 in a.items():
        for (n2, e2), v2 in b.items():
            e = e1 + e2
            n = n1 + n2
            if e > eps_max or n < nu_min:
                continue
            k = (n, e)
            cur = r.get(k, Fraction(0)) + v1 * v2
            if cur:
                r[k] = cur
            else:
                r.pop(k, None)
    return r


def _bi_geom_inverse(X, nu_min):
    """1/X for X with a unique highest-nu-power leading monomial."""
    lead_key = max(X, key=lambda k: (k[0], -k[1]))
    (a0, e0), c0 = lead_key, X[lead_key]
    small = {(a - a0, e - e0): v / c0 for (a, e), v in X.items() if (a, e) != lead_key}
    inv = {(0, 0): Fraction(1)}
    term = {(0, 0): Fraction(1)}
    for _ in range(4 * (abs(nu_min) + 4)):
        term = _bi_scale(_bi_mul(term, small, 10 ** 9, nu_min + a0), Fraction(-1))
        if not term:
            break
        inv = _bi_add(inv, term)
    else:
        raise ReversionError("geometric inverse did not terminate")
    return {(a - a0, e - e0): v / c0 for (a, e), v in inv.items() if a - a0 >= nu_min}


def _compose_rows(rows_by_eps, X, eps_max, nu_min, var):
    """Substitute bivariate X for the base variable in sum_e eps^e T_e(base).

    SIGMA rows: exponent n means sigma^n, substituted as X^n.
    U rows: exponent n means u^n = Y^(-n) with Y = X; negative powers via X,
    positive via the exact geometric inverse of X.
    """
    tot = {}
    if var == SIGMA:
        max_pow = min(
            max((n for T in rows_by_eps.values() for (n, _p) in T.terms), default=0),
            eps_max,  # X = O(eps), so higher powers cannot contribute
        )
        powers = [{(0, 0): Fraction(1)}]
        for _ in range(max_pow):
            powers.append(_bi_mul(powers[-1], X, eps_max, nu_min))
        for e, T in rows_by_eps.items():
            for (n, p), c in T.terms.items():
                if p:
                    raise ReversionError("cannot revert log-bearing series")
                if n > max_pow:
                    continue
                term = _bi_scale(powers[n], c)
                tot = _bi_add(
                    tot,
                    {(a, ee + e): v for (a, ee), v in term.items() if ee + e <= eps_max},
                )
        return tot
    Xinv = _bi_geom_inverse(X, nu_min)
    max_pos = max((n for T in rows_by_eps.values() for (n, _p) in T.terms if n > 0), default=0)
    max_neg = -min((n for T in rows_by_eps.values() for (n, _p) in T.terms if n < 0), default=0)
    pow_pos = [{(0, 0): Fraction(1)}]
    for _ in range(max_pos):
        pow_pos.append(_bi_mul(pow_pos[-1], Xinv, 10 ** 9, nu_min))
    pow_neg = [{(0, 0): Fraction(1)}]
    for _ in range(max_neg):
        pow_neg.append(_bi_mul(pow_neg[-1], X, 10 ** 9, nu_min))
    for e, T in rows_by_eps.items():
        for (n, p), c in T.terms.items():
            if p:
                raise ReversionError("cannot revert log-bearing series")
            base = pow_pos[n] if n >= 0 else pow_neg[-n]
            term = _bi_scale(base, c)
            tot = _bi_add(
                tot,
                {
                    (a, ee + e): v
                    for (a, ee), v in term.items()
                    if ee + e <= eps_max and a >= nu_min
                },
            )
    return tot


def _nu_poly(bivariate, eps_trunc):
    """Pack {(nu_pow, eps_pow): coeff} into an EpsilonSeries over NU."""
    rows = {}
    for (a, e), c in bivariate.items():
        rows.setdefault(e, {})[(a, 0)] = c
    nu_trunc = max((a for (a, _e) in bivariate), default=0)
    return EpsilonSeries(
        {e: AsymptoticSeries(NU, t, nu_trunc) for e, t in rows.items()}, eps_trunc
    )


def epsilon_reversion(nu: EpsilonSeries, base: str, eps_order: int | None = None) -> EpsilonSeries:
    """Invert nu(base, eps) for the base variable as a series in eps and nu.

    base=SIGMA: requires eps*nu = (sigma/2)(1 + O(sigma)) + O(eps^2) up to the
    leading slope; returns sigma(nu, eps) with polynomial-in-nu rows.
    base=U: requires eps*nu = (2w)^(1/2)(1 + O(u^2)); returns 2w(nu, eps) with
    Laurent-in-nu rows (for NU rows the low-power side is the unknown side;
    the honest window is certified by an exact substitution round trip).
    """
    if base not in (U, SIGMA):
        raise ReversionError(f"base must be U or SIGMA, not {base!r}")
    if nu.variable not in (None, base):
        raise ReversionError(f"input series is in {nu.variable}, expected {base}")
    eta = nu.shift_eps(1)  # eps * nu
    rows = eta.terms
    if any(e < 0 for e in rows):
        raise ReversionError("eps*nu still has negative eps powers; not invertible")
    lead = rows.get(0)
    target = {(1, 1): Fraction(1)}

    if base == SIGMA:
        if lead is None or lead.valuation() != 1 or lead.coeff(1) == 0:
            raise ReversionError("leading eps^0 row must start at sigma^1")
        slope = lead.coeff(1)
        honest = min(T.truncation_order + e for e, T in rows.items())
        if eps_order is None:
            eps_order = min(eta.truncation_eps + 1, honest)
        if eps_order > honest:
            raise TruncationError(
                f"requested eps order {eps_order} exceeds honest window {honest}; "
                "extend the input's variable order"
            )
        X = {(1, 1): 1 / slope}
        for _ in range(2 * eps_order + 8):
            resid = _bi_add(target, _bi_scale(_compose_rows(rows, X, eps_order, 0, SIGMA), -1))
            if not resid:
                break
            X = _bi_add(X, _bi_scale(resid, 1 / slope))
        else:
            raise ReversionError("sigma reversion did not converge")
        return _nu_poly(X, eps_order)

    if lead is None or lead.valuation() != -1 or lead.coeff(-1) == 0:
        raise ReversionError("leading eps^0 row must start at (2w)^(1/2)")
    slope = lead.coeff(-1)
    depth = max(T.truncation_order for T in rows.values())
    nu_min = -depth - 4
    if eps_order is None:
        eps_order = eta.truncation_eps
    Y = {(1, 1): 1 / slope}
    prev = None
    resid = target
    for _ in range(4 * (depth + eps_order) + 16):
        resid = _bi_add(target, _bi_scale(_compose_rows(rows, Y, eps_order, nu_min, U), -1))
        if not resid or resid == prev:
            break
        prev = resid
        Y = _bi_add(Y, _bi_scale(resid, 1 / slope))
    else:
        raise ReversionError("u-base reversion did not converge")
    # claim window: pessimistic data bound (unknown u^(T+1) input terms move
    # 2w at powers <= -T), sharpened by any explicit residual left over
    data_claim = 1 - min(T.truncation_order for T in rows.values())
    if resid:
        a_bad = max(a for (a, _e) in resid)
        claim_min = max(a_bad + 2, data_claim)
    else:
        claim_min = data_claim
    two_w = _bi_mul(Y, Y, eps_order, nu_min)
    two_w = {(a, e): v for (a, e), v in two_w.items() if a >= claim_min}
    if not two_w:
        raise ReversionError("input window too short: no exact reversion orders survive")
    result = _nu_poly(two_w, eps_order)
    check = reversion_residual(nu, result, U)
    if any(a >= claim_min for (a, _e) in check):
        raise ReversionError("round-trip certification failed inside claimed window")
    return result


def reversion_residual(nu: EpsilonSeries, base_expansion: EpsilonSeries, base: str):
    """Substitute a reversion result back into nu(base, eps); return eps*nu - prediction.

    Exact round-trip checker: the returned dict maps (nu_pow, eps_pow) to the
    uncancelled coefficient; empty means an identity within the window.
    """
    eta = nu.shift_eps(1)
    rows = eta.terms
    X = {}
    for e, s in base_expansion.terms.items():
        for (a, _p), c in s.terms.items():
            X[(a, e)] = c
    eps_max = base_expansion.truncation_eps
    if base == SIGMA:
        pred = _compose_rows(rows, X, eps_max, 0, SIGMA)
        return _bi_add({(1, 1): Fraction(1)}, _bi_scale(pred, -1))
    nu_min = min((a for (a, _e) in X), default=0) - 1
    # base_expansion is 2w = Y^2; recover Y by exact binomial square root
    lead_key = max(X, key=lambda k: (k[0], -k[1]))
    (a0, e0), c0 = lead_key, X[lead_key]
    if a0 % 2 or e0 % 2:
        raise ReversionError("2w expansion has odd leading powers; cannot sqrt")
    rn, rd = _isqrt_exact(c0.numerator), _isqrt_exact(c0.denominator)
    if rn is None or rd is None:
        raise ReversionError("leading coefficient is not a rational square")
    small = {(a - a0, e - e0): v / c0 for (a, e), v in X.items() if (a, e) != lead_key}
    root = {(0, 0): Fraction(1)}
    term = {(0, 0): Fraction(1)}
    c = Fraction(1)
    k = 0
    while True:
        k += 1
        c = c * (Fraction(1, 2) - (k - 1)) / k
        term = _bi_mul(term, small, 10 ** 9, nu_min - a0 // 2)
        if not term:
            break
        root = _bi_add(root, _bi_scale(term, c))
    Y = {(a + a0 // 2, e + e0 // 2): v * Fraction(rn, rd) for (a, e), v in root.items()}
    Y = {(a, e): v for (a, e), v in Y.items() if a >= nu_min}
    pred = _compose_rows(rows, Y, eps_max, nu_min, U)
    resid = _bi_add({(1, 1): Fraction(1)}, _bi_scale(pred, -1))
    return resid


def _isqrt_exact(n: int):
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------

def rational_linear_solve(A, b):
    """Solve A x = b exactly (Bareiss fraction-free elimination over integers)."""
    n = len(A)
    if any(len(row) != n for row in A) or len(b) != n:
        raise ValueError("A must be square and compatible with b")
    # clear denominators row by row
    M = []
    for i in range(n):
        row = [Fraction(x) for x in A[i]] + [Fraction(b[i])]
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // _gcd(lcm, x.denominator)
        M.append([int(x * lcm) for x in row])
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            pivot = next((r for r in range(k + 1, n) if M[r][k] != 0), None)
            if pivot is None:
                raise SingularMatrixError("singular matrix in exact solve")
            M[k], M[pivot] = M[pivot], M[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    if M[n - 1][n - 1] == 0:
        raise SingularMatrixError("singular matrix in exact solve")
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(M[i][n])
        for j in range(i + 1, n):
            acc -= M[i][j] * x[j]
        x[i] = acc / M[i][i]
    return x


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
