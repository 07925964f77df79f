"""End-to-end eigenvalue series machinery.

Pipeline: generate the small-q characteristic-value series from the Fourier
recurrence by exact perturbation theory; invert it to the Floquet exponent as
a function of (lambda, q); rewrite in (w, eps) and match against the cycle
series to pin the unknown generating-operator coefficients; finally revert
the beta-cycle series to produce the large-q eigenvalue expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curve import GeneratingOperator, apply_operator, beta_base_series, operator_table
from .exact_series import (
    SIGMA,
    U,
    AsymptoticSeries,
    EpsilonSeries,
    TruncationError,
    epsilon_reversion,
    rational_linear_solve,
    rational_to_str,
)
from .ratfunc import Poly, RatFunc


class ResonantNuError(ValueError):
    """Integer nu hits a resonant denominator in the rational-function series."""


class MatchingError(ValueError):
    """Operator determination met a singular or inconsistent system."""


@dataclass(frozen=True)
class NuRationalSeries:
    """lambda_nu(q) = nu^2 + sum_k R_k(nu) q^(2k) with rational-function coefficients."""

    terms: dict  # q-power (even int >= 0) -> RatFunc; term 0 is nu^2

    def order(self) -> int:
        return max(self.terms)

    def coeff(self, q_power: int) -> RatFunc:
        return self.terms.get(q_power, RatFunc(0))

    def eval(self, nu: float, q: float) -> float:
        x = Fraction(nu).limit_denominator(10 ** 12)
        try:
            return sum(float(r.eval(x)) * q ** k for k, r in self.terms.items())
        except ZeroDivisionError:
            raise ResonantNuError(
                f"nu={nu} hits a resonant denominator of the small-q series"
            ) from None


@dataclass(frozen=True)
class LargeQSeries:
    """lambda_nu(q) = sum over half-integer q-powers of polynomial-in-nu terms.

    Keys are 2*(q-power), so 2 means q, 1 means sqrt(q), -7 means q^(-7/2).
    """

    terms: dict  # int twice_q_power -> Poly in nu

    def coeff(self, twice_q_power: int) -> Poly:
        return self.terms.get(twice_q_power, Poly())

    def eval(self, nu: float, q: float) -> float:
        rq = q ** 0.5
        return sum(float(p.eval(Fraction(nu).limit_denominator(10 ** 12))) * rq ** k
                   for k, p in self.terms.items())

    def last_term_magnitude(self, nu: float, q: float) -> float:
        k = min(self.terms)
        return abs(float(self.terms[k].eval(Fraction(nu).limit_denominator(10 ** 12)))
                   * q ** (k / 2.0))


def small_q_series(order_q: int = 8) -> NuRationalSeries:
    """Exact Rayleigh-Schrodinger perturbation on (lam - (nu+2k)^2) c_k = q(c_{k+1} + c_{k-1}).

    Intermediate normalization c_0 = 1; odd orders vanish; denominators build
    up only (nu^2 - m^2) factors after reduction.
    """
    if order_q < 2 or order_q % 2:
        raise ValueError("order_q must be an even integer >= 2")
    lam = {}
    c = {(0, 0): RatFunc(1)}

    def cget(k, j):
        return c.get((k, j), RatFunc(0))

    for j in range(1, order_q + 1):
        for k in [kk for kk in range(-j, j + 1) if kk]:
            rhs = cget(k + 1, j - 1) + cget(k - 1, j - 1)
            for i in range(2, j + 1, 2):
                if i in lam and not lam[i].is_zero():
                    rhs = rhs - lam[i] * cget(k, j - i)
            den = RatFunc(Poly({0: Fraction(-4 * k * k), 1: Fraction(-4 * k)}))
            c[(k, j)] = rhs / den
        rhs = cget(1, j - 1) + cget(-1, j - 1)
        for i in range(2, j, 2):
            if i in lam and not lam[i].is_zero():
                rhs = rhs - lam[i] * cget(0, j - i)
        if not rhs.is_zero():
            lam[j] = rhs
    terms = {0: RatFunc(Poly({2: Fraction(1)}))}
    for j, r in lam.items():
        if j % 2:
            raise MatchingError(f"odd-order term q^{j} survived the perturbation recursion")
        terms[j] = r
    return NuRationalSeries(terms)


# ---------------------------------------------------------------------------
# inversion to nu(lambda, q)
# ---------------------------------------------------------------------------

def _bi_accum(d, key, v):
    cur = d.get(key, Fraction(0)) + v
    if cur:
        d[key] = cur
    else:
        d.pop(key, None)


def _bi_mul(a, b, xmax, qmax):
    r = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            i, j = i1 + i2, j1 + j2
            if i > xmax or j > qmax:
                continue
            _bi_accum(r, (i, j), v1 * v2)
    return r


def _bi_inv(a, xmax, qmax):
    c0 = a.get((0, 0))
    if not c0:
        raise MatchingError("series inverse needs a unit constant term")
    u = {k: v / c0 for k, v in a.items() if k != (0, 0)}
    out = {(0, 0): Fraction(1)}
    term = {(0, 0): Fraction(1)}
    for _ in range(2 * (xmax + qmax) + 4):
        term = {k: -v for k, v in _bi_mul(term, u, xmax, qmax).items()}
        if not term:
            break
        for k, v in term.items():
            _bi_accum(out, k, v)
    return {k: v / c0 for k, v in out.items()}


def _bi_sqrt(a, xmax, qmax):
    if a.get((0, 0)) != Fraction(1):
        raise MatchingError("series sqrt needs a unit constant term")
    u = {k: v for k, v in a.items() if k != (0, 0)}
    out = {(0, 0): Fraction(1)}
    term = {(0, 0): Fraction(1)}
    coef = Fraction(1)
    k = 0
    while True:
        k += 1
        coef = coef * (Fraction(1, 2) - (k - 1)) / k
        term = _bi_mul(term, u, xmax, qmax)
        if not term:
            return out
        for kk, v in term.items():
            _bi_accum(out, kk, coef * v)


def _invert_bivariate(series: NuRationalSeries, xmax: int, qmax: int) -> dict:
    """nu/sqrt(lambda) as {(x_power, q_power): coeff}, x = 1/lambda.

    Iterates S <- sqrt(1 - sum_k q^(2k) R_k(sqrt(l) S)/l) to its fixed point;
    rational functions of nu are rewritten exactly in (x, S^2).
    """
    S = {(0, 0): Fraction(1)}
    rats = {k: r for k, r in series.terms.items() if k}

    def poly_to_xS(p: Poly, S2):
        if not p.even_part_only():
            raise MatchingError("inversion expects even polynomials in nu")
        deg = p.degree() // 2 if not p.is_zero() else 0
        out = {}
        S2p = {(0, 0): Fraction(1)}
        by_m = {k // 2: v for k, v in p.c.items()}
        for m in range(deg + 1):
            if m:
                S2p = _bi_mul(S2p, S2, xmax, qmax)
            if m in by_m:
                for (i, j), v in S2p.items():
                    if i + deg - m <= xmax:
                        _bi_accum(out, (i + deg - m, j), by_m[m] * v)
        return out, deg

    for _ in range(2 * (xmax + qmax) + 8):
        S2 = _bi_mul(S, S, xmax, qmax)
        acc = {}
        for j, r in rats.items():
            n_ser, dn = poly_to_xS(r.num, S2)
            d_ser, dd = poly_to_xS(r.den, S2)
            shift = dd - dn + 1
            if shift < 0:
                raise MatchingError("eigenvalue coefficient grows with lambda; not invertible")
            term = _bi_mul(n_ser, _bi_inv(d_ser, xmax, qmax), xmax, qmax)
            for (i, jj), v in term.items():
                if i + shift <= xmax and jj + j <= qmax:
                    _bi_accum(acc, (i + shift, jj + j), v)
        new_S = _bi_sqrt(
            {(0, 0): Fraction(1), **{k: -v for k, v in acc.items()}}, xmax, qmax
        )
        if new_S == S:
            return S
        S = new_S
    raise MatchingError("inversion did not reach a fixed point")


def inverse_lambda_table(series: NuRationalSeries, lambda_order: int = 21) -> dict:
    """Brackets of nu = sqrt(lambda) + sum_j bracket_j * lambda^(-(2j-1)/2).

    Returns {j: {q_power: coeff}} for 2j-1 <= lambda_order, keeping only
    q-powers within the input's accuracy scope.
    """
    if lambda_order % 2 == 0:
        raise ValueError("lambda_order indexes odd half-integer powers")
    qmax = series.order()
    if qmax < 6:
        raise TruncationError("need the small-q series through q^6 at least")
    xmax = (lambda_order + 1) // 2 + qmax // 2
    S = _invert_bivariate(series, xmax, qmax)
    out = {}
    for (i, j), v in S.items():
        if i == 0 and j == 0:
            continue
        if 2 * i - 1 <= lambda_order:
            out.setdefault(i, {})[j] = v
    return out


def invert_small_q(series: NuRationalSeries, lambda_order: int = 21) -> EpsilonSeries:
    """nu(lambda, q) rewritten in (w, eps): rows eps^(2j-1-2k) of u-series.

    lambda^(-(2j-1)/2) q^(2k) maps to eps^(2j-1-4k) u^(2j-1).  Each row's
    truncation reflects what the input q-order actually determines:
    u-powers up to min(e + 2*q_order, lambda_order).
    """
    table = inverse_lambda_table(series, lambda_order)
    qmax = series.order()
    rows = {}
    for ji, qcol in table.items():
        for qq, v in qcol.items():
            e = 2 * ji - 1 - 2 * qq
            rows.setdefault(e, {})[(2 * ji - 1, 0)] = v
    rows.setdefault(-1, {})[(-1, 0)] = Fraction(1)  # sqrt(lambda) = u^(-1)/eps
    eps_rows = {
        e: AsymptoticSeries(U, t, min(e + 2 * qmax, lambda_order)) for e, t in rows.items()
    }
    return EpsilonSeries(eps_rows, max(eps_rows))


def determine_operator(m: int, target: EpsilonSeries, base: AsymptoticSeries) -> GeneratingOperator:
    """Solve for the order-m generating operator from the eps^(2m-1) target row.

    Builds the exact linear system from the operator ansatz applied to the
    u-expansion of the base period: the leading u^(2m-1) coefficient must
    vanish and the known target coefficients must be reproduced.  Any spare
    known coefficients are used as consistency checks.
    """
    if m not in (3, 4):
        raise ValueError("determination implemented for m in {3, 4}")
    if base.variable != U:
        raise ValueError("base series must be the u-expansion")
    row = target.terms.get(2 * m - 1)
    if row is None or row.is_zero():
        raise MatchingError(f"target eps^{2*m-1} row is missing or zero")
    known = {n: c for (n, _p), c in row.terms.items()}
    basis = [
        GeneratingOperator(0, ((Fraction(1), m - i, 2 * m - i),))
        for i in range(m + 1)
    ]
    applied = [apply_operator(b, base) for b in basis]
    lead = 2 * m - 1
    if lead in known:
        raise MatchingError(
            f"target row contains u^{lead}; the leading coefficient should be absent"
        )
    powers = sorted(known)
    if len(powers) < m:
        raise MatchingError(
            f"need at least {m} known coefficients beyond the vanishing leading term"
        )
    eq_powers = [lead] + powers[:m]
    A = [[ap.coeff(p) for ap in applied] for p in eq_powers]
    b = [Fraction(0)] + [known[p] for p in powers[:m]]
    coeffs = rational_linear_solve(A, b)
    if all(c == 0 for c in coeffs):
        raise MatchingError("determination produced the zero operator")
    # overdetermined consistency: remaining known coefficients must match
    for p in powers[m:]:
        pred = sum(c * ap.coeff(p) for c, ap in zip(coeffs, applied))
        if pred != known[p]:
            raise MatchingError(
                f"inconsistent system: u^{p} predicts {pred}, target has {known[p]}"
            )
    return GeneratingOperator(
        m, tuple((c, m - i, 2 * m - i) for i, c in enumerate(coeffs))
    )


# ---------------------------------------------------------------------------
# large-q expansion from the beta cycle
# ---------------------------------------------------------------------------

def accuracy_cutoff(eps_order: int = 7) -> int:
    """Lowest twice-q-power kept in the large-q series for a given eps input order.

    The eps^l row of sigma(nu, eps) maps to q^((2-l)/2); rows through l =
    eps_order + 2 are exactly determined by operators through m = (eps_order+1)/2.
    """
    return 2 - (eps_order + 2)


def large_q_series(order: int = 7, var_order: int = 14) -> LargeQSeries:
    """Large-q characteristic-value series from reverting the beta-cycle rows.

    nu(sigma, eps) = sum eps^(2m-1) D_m[beta base]; reversion gives
    sigma(nu, eps), then lambda = 2q(1 + sigma) with eps = q^(-1/2).  The sign
    convention fixes the sqrt(q) coefficient to -4 nu.
    """
    if order > 7:
        raise ValueError("operators are known through m=4, i.e. eps^7")
    base = beta_base_series(var_order)
    ops = operator_table()
    rows = {-1: base}
    for op in ops:
        if 2 * op.m - 1 > order:
            break
        rows[2 * op.m - 1] = apply_operator(op, base)
    nu_rows = EpsilonSeries(rows, order)
    sigma = epsilon_reversion(nu_rows, SIGMA, eps_order=order + 2)
    # lambda = 2q(1 + sigma): eps^l nu^a -> 2 q^(1-l/2) nu^a; flip nu -> -nu
    terms = {}
    floor = accuracy_cutoff(order)
    terms[2] = Poly({0: Fraction(2)})
    for e, s in sigma.terms.items():
        key = 2 - e
        if key < floor:
            continue
        for (a, _p), cc in s.terms.items():
            v = 2 * cc * Fraction(-1) ** a
            if v:
                cur = terms.get(key, Poly())
                terms[key] = cur + Poly({a: v})
    return LargeQSeries({k: p for k, p in terms.items() if not p.is_zero()})


def nu_series_from_inverse(lambda_order: int = 21, order_q: int = 8) -> EpsilonSeries:
    """Convenience: small-q series -> inversion -> (w, eps) rows."""
    return invert_small_q(small_q_series(order_q), lambda_order)


def eigen_small_table_text(series: NuRationalSeries, fmt: str = "text") -> str:
    """Rendered small-q eigenvalue series (exact rationals)."""
    lines = []
    for k in sorted(series.terms):
        r = series.coeff(k)
        head = "1" if k == 0 else f"q^{k}"
        lines.append(f"{head}: {r.format('nu')}")
    return "\n".join(lines)


def large_q_table_rows(series: LargeQSeries):
    """(q-power string, poly) rows, descending, for CLI rendering."""
    rows = []
    for k in sorted(series.terms, reverse=True):
        if k == 0:
            head = "1"
        elif k % 2 == 0:
            head = f"q^{k // 2}"
        else:
            head = f"q^({k}/2)"
        rows.append((head, series.terms[k]))
    return rows


def rational_str(x: Fraction) -> str:
    return rational_to_str(x)
