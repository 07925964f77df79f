"""Symbolic WKB densities for the rescaled Mathieu operator.

The phase derivative expands as p = sum_m eps^(m-1) p_m(z).  Each density
p_m lives in the ring generated by  c = cos 2z,  s = sin 2z  and
P = p_0 = sqrt(2(w - c)), with the relations  s^2 = 1 - c^2  and
P^2 = 2(w - c) kept reduced.  Monomials are keyed (j, a, b, e) for
w^j * c^a * s^b * P^e with GaussianRational coefficients; canonicalization
rewrites s^2 -> 1 - c^2 and w -> (P^2 + 2c)/2, so stored keys have j = 0,
b in {0, 1}, and the P-exponent parity of p_m matches m+1 mod 2 (densities
with m >= 1 carry only negative P-powers).

The recursion (from substituting the WKB ansatz into the equation) is

    p_0^2 = 2(w - c),
    p_m = (i p_{m-1}' - sum_{k=1}^{m-1} p_k p_{m-k}) / (2 p_0),   m >= 1,

with  c' = -2s,  s' = 2c,  P' = 2s/P.
"""

from __future__ import annotations

import functools

import numpy as np

from .exact_series import Fraction, GaussianRational

GR_ZERO = GaussianRational(0, 0)


class TurningPointError(ValueError):
    """Evaluation at (or too near) a zero of p_0."""


def _accum(terms, key, coeff):
    cur = terms.get(key, GR_ZERO) + coeff
    if cur:
        terms[key] = cur
    else:
        terms.pop(key, None)


def _reduce(terms):
    """Canonicalize: s^2 -> 1 - c^2 and w -> (P^2 + 2c)/2.

    Eliminating w makes the monomial basis c^a s^(0,1) P^e linearly
    independent, so equality of densities is equality of term dicts.
    """
    work = dict(terms)
    out = {}
    while work:
        (j, a, b, e), coeff = work.popitem()
        if b >= 2:
            _accum(work, (j, a, b - 2, e), coeff)
            _accum(work, (j, a + 2, b - 2, e), -coeff)
        elif j >= 1:
            half = coeff * Fraction(1, 2)
            _accum(work, (j - 1, a, b, e + 2), half)
            _accum(work, (j - 1, a + 1, b, e), coeff)
        else:
            _accum(out, (j, a, b, e), coeff)
    return out


class WkbDensity:
    """One WKB density p_m as a reduced monomial sum."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms):
        self.m = m
        self.terms = {k: v for k, v in _reduce(terms).items() if v}

    # -- ring operations ------------------------------------------------------

    def __mul__(self, other: "WkbDensity") -> "WkbDensity":
        out = {}
        for (j1, a1, b1, e1), c1 in self.terms.items():
            for (j2, a2, b2, e2), c2 in other.terms.items():
                _accum(out, (j1 + j2, a1 + a2, b1 + b2, e1 + e2), c1 * c2)
        return WkbDensity(self.m + other.m, out)

    def __add__(self, other: "WkbDensity") -> "WkbDensity":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accum(out, k, c)
        return WkbDensity(self.m, out)

    def scale(self, c) -> "WkbDensity":
        if not isinstance(c, GaussianRational):
            c = GaussianRational(c)
        return WkbDensity(self.m, {k: c * v for k, v in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def times_i(self) -> "WkbDensity":
        return self.scale(GaussianRational(0, 1))

    def div_p0(self) -> "WkbDensity":
        """Multiply by P^-1 (exact in the monomial basis)."""
        return WkbDensity(
            self.m, {(j, a, b, e - 1): c for (j, a, b, e), c in self.terms.items()}
        )

    def diff_z(self) -> "WkbDensity":
        """d/dz with c' = -2s, s' = 2c, P' = 2s/P."""
        out = {}
        for (j, a, b, e), c in self.terms.items():
            if a:
                _accum(out, (j, a - 1, b + 1, e), GaussianRational(-2 * a) * c)
            if b:
                _accum(out, (j, a + 1, b - 1, e), GaussianRational(2 * b) * c)
            if e:
                _accum(out, (j, a, b + 1, e - 2), GaussianRational(2 * e) * c)
        return WkbDensity(self.m, out)

    # -- structure checks -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def parity_flip(self) -> "WkbDensity":
        """z -> -z, i.e. (c, s) -> (c, -s)."""
        return WkbDensity(
            self.m,
            {k: (c if k[2] % 2 == 0 else -c) for k, c in self.terms.items()},
        )

    def real_part_zero(self) -> bool:
        return all(c.re == 0 for c in self.terms.values())

    def imag_part_zero(self) -> bool:
        return all(c.im == 0 for c in self.terms.values())

    def p_exponents(self):
        return sorted({k[3] for k in self.terms})

    def canonical_text(self) -> str:
        """Stable text form (sorted monomials) for golden-file comparison."""
        bits = []
        for (j, a, b, e), c in sorted(self.terms.items()):
            mono = []
            if j:
                mono.append(f"w^{j}")
            if a:
                mono.append(f"c^{a}")
            if b:
                mono.append(f"s^{b}")
            if e:
                mono.append(f"P^{e}")
            head = "*".join(mono) if mono else "1"
            bits.append(f"({c})*{head}")
        return " + ".join(bits) if bits else "0"

    def __eq__(self, other):
        if not isinstance(other, WkbDensity):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"WkbDensity(m={self.m}, {len(self.terms)} monomials)"

    # -- numeric evaluation -----------------------------------------------------

    def evaluate(self, w, z, P):
        """Value given a branch-resolved P (scalars or numpy arrays)."""
        c = np.cos(2 * np.asarray(z, dtype=complex))
        s = np.sin(2 * np.asarray(z, dtype=complex))
        w = complex(w)
        total = np.zeros_like(c)
        for (j, a, b, e), coeff in self.terms.items():
            total = total + coeff.to_complex() * w ** j * c ** a * s ** b * P ** e
        return total


@functools.lru_cache(maxsize=None)
def wkb_density(m: int) -> WkbDensity:
    """Density p_m from the recursion; exact, memoized."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return WkbDensity(0, {(0, 0, 0, 1): GaussianRational(1)})
    total = wkb_density(m - 1).diff_z().times_i()
    for k in range(1, m):
        total = total - wkb_density(k) * wkb_density(m - k)
    final = total.div_p0().scale(Fraction(1, 2))
    return WkbDensity(m, final.terms)


def recursion_residual(m: int) -> WkbDensity:
    """sum_{k=0}^m p_k p_{m-k} - i p_{m-1}'  (for m=0: p_0^2 - 2(w-c)); zero if consistent."""
    total = WkbDensity(m, {})
    for k in range(0, m + 1):
        total = total + wkb_density(k) * wkb_density(m - k)
    if m == 0:
        total = total + WkbDensity(
            0, {(1, 0, 0, 0): GaussianRational(-2), (0, 1, 0, 0): GaussianRational(2)}
        )
    else:
        total = total - wkb_density(m - 1).diff_z().times_i()
    return total


# ---------------------------------------------------------------------------
# numeric branch handling
# ---------------------------------------------------------------------------

class BranchState:
    """Continuation state for P = sqrt(2(w - cos 2z)) along a path."""

    __slots__ = ("z", "P")

    def __init__(self, z=None, P=None):
        self.z = z
        self.P = P


def p0_squared(w, z):
    return 2.0 * (complex(w) - np.cos(2 * np.asarray(z, dtype=complex)))


def resolve_branch(w, z, state: BranchState | None = None, rel_tol: float = 1e-6):
    """P at z: principal root if no state, else the root continuing state.P.

    Points with |P| below rel_tol times the natural scale sqrt(|2(w+1)|) are
    treated as turning points and rejected.
    """
    val = p0_squared(w, z)
    r = np.sqrt(val)
    if abs(val) < rel_tol ** 2 * max(1.0, abs(2.0 * (w + 1.0))):
        raise TurningPointError(f"z={z} is (numerically) a turning point for w={w}")
    if state is not None and state.P is not None:
        if abs(r - state.P) > abs(-r - state.P):
            r = -r
    if state is not None:
        state.z, state.P = z, r
    return r


def continue_branch_along(w, zs, start_principal=True):
    """Branch-resolved P along an ordered path (numpy array of nodes).

    Returns the P values; raises if a neighbouring step is so large that the
    sign choice is ambiguous (jump > 0.5|P|).
    """
    vals = p0_squared(w, zs)
    if np.any(np.abs(vals) < 1e-18):
        raise TurningPointError("path passes through a turning point")
    roots = np.sqrt(vals)
    out = np.empty_like(roots)
    prev = roots[0] if start_principal else -roots[0]
    out[0] = prev
    for i in range(1, len(roots)):
        r = roots[i]
        if abs(r - prev) > abs(-r - prev):
            r = -r
        if abs(r - prev) > 0.5 * abs(r):
            raise BranchContinuityError(
                f"branch jump at node {i}: |dP|={abs(r - prev):.3g} vs |P|={abs(r):.3g}; "
                "increase node count or adjust the contour"
            )
        out[i] = r
        prev = r
    return out


class BranchContinuityError(RuntimeError):
    """Adjacent contour nodes are too far apart to continue the branch safely."""


def wkb_eval(m: int, w, z, branch: BranchState | None = None):
    """Numeric p_m(z) with the P-branch fixed by the continuation state."""
    P = resolve_branch(w, z, branch)
    return complex(wkb_density(m).evaluate(w, z, P))
