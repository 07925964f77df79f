"""Elliptic-curve data and cycle period series for the Mathieu operator.

The curve y^2 = (x^2 + lambda)^2 - 4q^2 carries two homology cycles; the
leading WKB form integrates to hypergeometric closed forms along them.  This
module holds the exact expansions of those periods (alpha at w = infinity in
u = (2w)^(-1/2), beta at w = 1 in sigma = w - 1, both with the pi / i*pi
prefactors stripped so coefficients stay rational), the log-bearing dual
expansions, and the generating differential operators that map the base
period to the higher WKB periods.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact_series import (
    SIGMA,
    U,
    AsymptoticSeries,
    EpsilonSeries,
    TruncationError,
    rational_to_str,
)

ALPHA = "alpha"
BETA = "beta"

DEFAULT_U_ORDER = 24
DEFAULT_SIGMA_ORDER = 16


class DegenerateCurveError(ValueError):
    """lambda = +-2q collapses a branch-point pair."""


@dataclass(frozen=True)
class CurveParams:
    """Mathieu/curve parameters with the rescaled quantities derived."""

    lam: complex
    q: float

    def __post_init__(self):
        if not (self.q > 0):
            raise ValueError("q must be positive")
        if self.lam != self.lam or abs(self.lam) == math.inf:
            raise ValueError("lambda must be finite")

    @property
    def w(self):
        return self.lam / (2 * self.q)

    @property
    def eps(self) -> float:
        return self.q ** -0.5


@dataclass(frozen=True)
class BranchPoints:
    """The four branch points and how they pair into cuts."""

    points: tuple
    cuts: tuple


def branch_points(p: CurveParams) -> BranchPoints:
    lam, q = complex(p.lam), p.q
    if lam == 2 * q or lam == -2 * q:
        raise DegenerateCurveError("degenerate curve: lambda = +-2q")
    a = 1j * cmath.sqrt(lam + 2 * q)
    b = 1j * cmath.sqrt(lam - 2 * q)
    pts = (a, b, -b, -a)
    return BranchPoints(points=pts, cuts=((a, b), (-b, -a)))


# ---------------------------------------------------------------------------
# base period series (log-free)
# ---------------------------------------------------------------------------

def _binomial_series_u(alpha: Fraction, inner: dict, cap: int) -> dict:
    """(1 + inner)^alpha as a u-power dict; inner has positive valuation."""
    out = {0: Fraction(1)}
    term = {0: Fraction(1)}
    coef = Fraction(1)
    k = 0
    while True:
        k += 1
        coef = coef * (alpha - (k - 1)) / k
        term = _dict_mul(term, inner, cap)
        if not term:
            return out
        for n, v in term.items():
            _dict_accum(out, n, coef * v)


def _dict_mul(a: dict, b: dict, cap: int) -> dict:
    r = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j > cap:
                continue
            _dict_accum(r, i + j, x * y)
    return r


def _dict_accum(d, k, v):
    cur = d.get(k, Fraction(0)) + v
    if cur:
        d[k] = cur
    else:
        d.pop(k, None)


def _gauss_coeff(a: Fraction, b: Fraction, c: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out = out * (a + i) * (b + i) / ((c + i) * (1 + i))
    return out


def alpha_base_series(order: int = DEFAULT_U_ORDER) -> AsymptoticSeries:
    """(1/pi) * alpha-period of p_0, expanded at w=infinity in u = (2w)^(-1/2).

    Equals sqrt(2(w+1)) F(-1/2, 1/2, 1; 2/(w+1)) = u^(-1)(1+x)^(1/2) F(.; 2x/(1+x))
    with x = 2u^2; the pi prefactor is stripped.  Exponents run -1, 3, 7, ...
    """
    if order > 200:
        raise TruncationError("u-order cap exceeded")
    cap = order + 1  # internal powers of u for A*u
    x = {2: Fraction(2)}
    sq = _binomial_series_u(Fraction(1, 2), x, cap)
    tser = _dict_mul({2: Fraction(4)}, _binomial_series_u(Fraction(-1), x, cap), cap)
    fser = {0: Fraction(1)}
    tpow = {0: Fraction(1)}
    k = 0
    while True:
        k += 1
        tpow = _dict_mul(tpow, tser, cap)
        if not tpow:
            break
        fk = _gauss_coeff(Fraction(-1, 2), Fraction(1, 2), Fraction(1), k)
        for n, v in tpow.items():
            _dict_accum(fser, n, fk * v)
    prod = _dict_mul(sq, fser, cap)
    return AsymptoticSeries(U, {(n - 1, 0): v for n, v in prod.items()}, order)


def beta_base_series(order: int = DEFAULT_SIGMA_ORDER) -> AsymptoticSeries:
    """(1/(i*pi)) * beta-period of p_0 at w ~ 1: (sigma/2) F(1/2, 1/2, 2; -sigma/2).

    The i*pi prefactor is stripped; coefficients are rational.
    """
    if order > 200:
        raise TruncationError("sigma-order cap exceeded")
    terms = {}
    for k in range(0, order):
        fk = _gauss_coeff(Fraction(1, 2), Fraction(1, 2), Fraction(2), k)
        terms[(k + 1, 0)] = fk * Fraction(1, 2) * Fraction(-1, 2) ** k
    return AsymptoticSeries(SIGMA, terms, order)


# ---------------------------------------------------------------------------
# dual (log-bearing) period series
# ---------------------------------------------------------------------------

ALPHA_AT_SIGMA = "alpha_at_sigma"
BETA_AT_INF = "beta_at_inf"


@dataclass(frozen=True)
class Ln2Pair:
    """Exact coefficient a + b*ln2."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __add__(self, other):
        return Ln2Pair(self.a + other.a, self.b + other.b)

    def scale(self, c):
        c = Fraction(c)
        return Ln2Pair(c * self.a, c * self.b)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def value(self) -> float:
        return float(self.a) + float(self.b) * math.log(2)

    def __str__(self):
        return f"{self.a} + {self.b}*ln2"


@dataclass(frozen=True)
class DualSeries:
    """Expansion with coefficients in Q + Q*ln2, log terms, and a 1/pi prefactor.

    terms maps (exponent, logpower) -> Ln2Pair; logpower 1 multiplies ln(2w)
    for the U variable and ln(sigma) for SIGMA.  The overall 1/pi is implicit.
    """

    variable: str
    terms: dict = field(default_factory=dict)
    truncation_order: int = 0

    def coeff(self, exponent: int, logpow: int = 0) -> Ln2Pair:
        return self.terms.get((exponent, logpow), Ln2Pair())

    def evaluate(self, value: float) -> float:
        # U: logpower-1 terms carry ln(2w) = ln(1/u^2); SIGMA: ln(sigma)
        log_v = math.log(1.0 / value ** 2) if self.variable == U else math.log(value)
        total = 0.0
        for (n, p), pair in self.terms.items():
            t = pair.value() * value ** n
            if p:
                t *= log_v
            total += t
        return total / math.pi


def _harmonic(k: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, k + 1)), Fraction(0))


def _odd_harmonic(k: int) -> Fraction:
    return sum((Fraction(1, 2 * j - 1) for j in range(1, k + 1)), Fraction(0))


def _psi_half(k: int):
    """psi(1/2 + k) + gamma as (rational, ln2-multiple); psi(1/2+k) = -g - 2ln2 + 2*O_k."""
    return 2 * _odd_harmonic(k), Fraction(-2)


def dual_base_series(cycle_point: str, order: int) -> DualSeries:
    """Log-bearing expansion of the opposite cycle's period at each point.

    BETA_AT_INF: (1/pi)-stripped beta period at w=infinity (U variable; ln 2w terms).
    ALPHA_AT_SIGMA: (1/pi)-stripped alpha period at w ~ 1 (SIGMA variable; ln sigma).
    Uses the exact log-case hypergeometric connection formulas; ln 2 is kept
    as a formal constant.
    """
    if cycle_point == BETA_AT_INF:
        return _beta_at_inf(order)
    if cycle_point == ALPHA_AT_SIGMA:
        return _alpha_at_sigma(order)
    raise ValueError(f"unknown dual expansion point {cycle_point!r}")


def _beta_at_inf(order: int) -> DualSeries:
    """(1/2)(w-1) F(1/2,1/2,2;(1-w)/2) at w=inf, over 1/pi, in u with ln 2w.

    Connection formula for F(a,a;c;z) at z=-inf gives
    (sqrt2/pi) sum_k C_k (-2)^k (w-1)^(1/2-k) [ln(w-1) - ln2 + psi-part_k],
    C_k = (1/2)_k(-1/2)_k/(k!)^2; re-expanded here in u with
    (w-1)^(1/2-k) = 2^(k-1/2) u^(2k-1) (1-2u^2)^(1/2-k) and
    ln(w-1) = ln(2w) - ln2 + ln(1-2u^2).
    """
    cap = order + 2
    # ln(1-2u^2) as u-dict
    log_inner = {}
    p = {0: Fraction(1)}
    two_u2 = {2: Fraction(2)}
    n = 0
    while True:
        n += 1
        p = _dict_mul(p, two_u2, cap)
        if not p:
            break
        for m, v in p.items():
            _dict_accum(log_inner, m, -v / n)
    terms = {}

    def add(n, logp, pair):
        key = (n, logp)
        cur = terms.get(key, Ln2Pair())
        new = cur + pair
        if new:
            terms[key] = new
        else:
            terms.pop(key, None)

    k = 0
    Ck = Fraction(1)
    while 2 * k - 1 <= order:
        if k > 0:
            Ck = Ck * (Fraction(1, 2) + k - 1) * (Fraction(-1, 2) + k - 1) / (k * k)
        # psi-part: 2 psi(k+1) - psi(1/2+k) - psi(3/2-k); gammas cancel
        o1, l1 = _psi_half(k)            # psi(1/2+k)+g
        kk = abs(k - 1)                   # psi(3/2-k) = psi(1/2+(1-k)) = psi(1/2+|1-k|) by reflection
        o2, l2 = _psi_half(kk)
        rat = 2 * _harmonic(k) - o1 - o2
        ln2c = -(l1 + l2)                 # = +4
        # coefficient in front: C_k (-2)^k * 2^k = C_k (-4)^k, times u^{2k-1}(1-2u^2)^{1/2-k}
        pref = Ck * Fraction(-4) ** k
        shell = _binomial_series_u(Fraction(1, 2) - k, {2: Fraction(-2)}, cap)
        # bracket = ln((w-1)/2) + psi-part
        #         = ln(2w) + ln(1-2u^2) + rat + (ln2c - 2) ln2
        const = Ln2Pair(rat, ln2c - 2)
        for m, v in shell.items():
            n_out = 2 * k - 1 + m
            if n_out > order:
                continue
            add(n_out, 1, Ln2Pair(pref * v, Fraction(0)))
            add(n_out, 0, const.scale(pref * v))
        log_shell = _dict_mul(shell, log_inner, cap)
        for m, v in log_shell.items():
            n_out = 2 * k - 1 + m
            if n_out > order:
                continue
            add(n_out, 0, Ln2Pair(pref * v, Fraction(0)))
        k += 1
    return DualSeries(U, terms, order)


def _alpha_at_sigma(order: int) -> DualSeries:
    """sqrt(2(w+1)) F(-1/2,1/2,1;2/(w+1)) at w ~ 1, over 1/pi, in sigma with ln sigma.

    c - a - b = 1 log case: F = 2/pi - (1/(2pi))(1-t) sum_k D_k (1-t)^k [ln(1-t) + e_k]
    with t = 2/(w+1), 1-t = (sigma/2)/(1+sigma/2),
    D_k = (1/2)_k(3/2)_k/(k!(k+1)!), e_k = -psi(k+1) - psi(k+2) + psi(k+1/2) + psi(k+3/2).
    """
    cap = order + 2
    half_sig = {1: Fraction(1, 2)}
    inv_shell = _binomial_series_u(Fraction(-1), half_sig, cap)   # (1+s/2)^(-1)
    one_minus_t = _dict_mul(half_sig, inv_shell, cap)             # (s/2)(1+s/2)^(-1)
    # minus_log_shell = -ln(1+s/2); ln(1-t) = ln s - ln2 + minus_log_shell
    minus_log_shell = {}
    p = {0: Fraction(1)}
    n = 0
    while True:
        n += 1
        p = _dict_mul(p, half_sig, cap)
        if not p:
            break
        for m, v in p.items():
            _dict_accum(minus_log_shell, m, Fraction(-1) ** n * v / n)
    sqrt_shell = _binomial_series_u(Fraction(1, 2), half_sig, cap)  # (1+s/2)^(1/2)

    # constant piece 4*(1+s/2)^(1/2) carries all sigma powers
    terms = {}
    for m, v in sqrt_shell.items():
        if m <= order:
            terms[(m, 0)] = Ln2Pair(4 * v, Fraction(0))

    def add(n, logp, pair):
        key = (n, logp)
        cur = terms.get(key, Ln2Pair())
        new = cur + pair
        if new:
            terms[key] = new
        else:
            terms.pop(key, None)

    k = 0
    Dk = Fraction(1)
    omt_pow = dict(one_minus_t)
    while k + 1 <= order:
        if k > 0:
            Dk = Dk * (Fraction(1, 2) + k - 1) * (Fraction(3, 2) + k - 1) / (k * (k + 1))
            omt_pow = _dict_mul(omt_pow, one_minus_t, cap)
        # e_k = -psi(k+1) - psi(k+2) + psi(k+1/2) + psi(k+3/2); gammas cancel
        o1, l1 = _psi_half(k)
        o2, l2 = _psi_half(k + 1)
        rat = -(_harmonic(k)) - (_harmonic(k + 1)) + o1 + o2
        ln2c = l1 + l2                     # = -4
        # contribution: -(1/2) * 2 (1+s/2)^{1/2} * D_k * omt^{k+1} [ln(1-t) + e_k]
        pref = -Dk
        shell = _dict_mul(sqrt_shell, omt_pow, cap)
        const = Ln2Pair(rat, ln2c - 1)     # e_k - ln2 from ln(1-t)
        for m, v in shell.items():
            if m > order:
                continue
            add(m, 1, Ln2Pair(pref * v, Fraction(0)))
            add(m, 0, const.scale(pref * v))
        extra = _dict_mul(shell, minus_log_shell, cap)
        for m, v in extra.items():
            if m > order:
                continue
            add(m, 0, Ln2Pair(pref * v, Fraction(0)))
        k += 1
    return DualSeries(SIGMA, terms, order)


# ---------------------------------------------------------------------------
# generating differential operators
# ---------------------------------------------------------------------------

class OperatorStructureError(ValueError):
    """Term list violates the w-power = d-power - m shape."""


@dataclass(frozen=True)
class GeneratingOperator:
    """Polynomial in (w, d_w) mapping the base period to the order-2m period."""

    m: int
    terms: tuple  # of (Fraction coeff, int wpow, int dpow)

    def __post_init__(self):
        for coeff, wpow, dpow in self.terms:
            if self.m > 0 and wpow != dpow - self.m:
                raise OperatorStructureError(
                    f"term w^{wpow} d^{dpow} breaks wpow = dpow - m for m={self.m}"
                )

    def to_json(self) -> str:
        return json.dumps(
            [
                {"coeff": rational_to_str(c), "wpow": w, "dpow": d}
                for c, w, d in self.terms
            ]
        )

    def apply_numeric(self, derivs, w0):
        """sum coeff * w0^wpow * derivs[dpow], given numeric derivative values."""
        return sum(float(c) * w0 ** wp * derivs[dp] for c, wp, dp in self.terms)


def _op(m, *terms):
    return GeneratingOperator(
        m, tuple((Fraction(num, den), wp, dp) for (num, den, wp, dp) in terms)
    )


_IDENTITY = GeneratingOperator(0, ((Fraction(1), 0, 0),))

_TABLE = (
    _op(1, (1, 6, 1, 2), (1, 12, 0, 1)),
    _op(2, (28, 45 * 32, 2, 4), (8, 3 * 32, 1, 3), (5, 3 * 32, 0, 2)),
    _op(
        3,
        (124, 945 * 64, 3, 6),
        (158, 105 * 64, 2, 5),
        (153, 35 * 64, 1, 4),
        (41, 14 * 64, 0, 3),
    ),
    _op(
        4,
        (127, 4725 * 8 * 16, 4, 8),
        (13, 175 * 16, 3, 7),
        (517, 63 * 16 * 16, 2, 6),
        (9539, 945 * 8 * 16, 1, 5),
        (15229, 135 * 128 * 16, 0, 4),
    ),
)


def operator_table() -> list:
    """The generating operators D_1 .. D_4 with exact coefficients."""
    return list(_TABLE)


def identity_operator() -> GeneratingOperator:
    return _IDENTITY


def _mul_w_power(s: AsymptoticSeries, j: int) -> AsymptoticSeries:
    """Multiply a series by w^j exactly (w = 1/(2u^2) resp. 1 + sigma)."""
    if j == 0:
        return s
    if s.variable == U:
        return s.shift(-2 * j).scale(Fraction(1, 2 ** j))
    if s.variable == SIGMA:
        out = AsymptoticSeries.zero(SIGMA, s.truncation_order)
        for i in range(j + 1):
            out = out + s.shift(i).truncate(s.truncation_order).scale(math.comb(j, i))
        return out
    raise ValueError("w-multiplication defined for U and SIGMA series only")


def apply_operator(op: GeneratingOperator, s: AsymptoticSeries) -> AsymptoticSeries:
    """Apply sum coeff w^j d_w^k to a U- or SIGMA-series, truncation tracked."""
    total = None
    for coeff, wpow, dpow in op.terms:
        t = s
        for _ in range(dpow):
            t = t.diff_w()
        t = _mul_w_power(t, wpow).scale(coeff)
        total = t if total is None else total + t
    if total is None:
        return AsymptoticSeries.zero(s.variable, s.truncation_order)
    val = total.valuation()
    if val is not None and val > total.truncation_order:
        raise TruncationError("operator application consumed the whole known window")
    return total


# ---------------------------------------------------------------------------
# Floquet exponent series on the two cycles
# ---------------------------------------------------------------------------

def nu_series(cycle: str, eps_order: int = 7, var_order: int | None = None) -> EpsilonSeries:
    """nu(w, eps) = sum_m eps^(2m-1) D_m[base period] on the requested cycle.

    ALPHA rows live in U (expansion at w = infinity), BETA rows in SIGMA
    (at w = 1); the pi resp. i*pi normalizations cancel exactly against the
    base-series prefactors, so all coefficients are rational.
    """
    if eps_order > 7:
        raise ValueError("eps_order capped at 7 (operators known through m=4)")
    if cycle == ALPHA:
        base = alpha_base_series(
            var_order if var_order is not None else DEFAULT_U_ORDER
        )
    elif cycle == BETA:
        base = beta_base_series(
            var_order if var_order is not None else DEFAULT_SIGMA_ORDER
        )
    else:
        raise ValueError(f"unknown cycle {cycle!r}")
    rows = {}
    ops = [identity_operator()] + operator_table()
    for m, op in enumerate(ops):
        if 2 * m - 1 > eps_order:
            break
        rows[2 * m - 1] = apply_operator(op, base)
    return EpsilonSeries(rows, eps_order)
