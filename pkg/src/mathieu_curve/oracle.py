"""Independent numerical ground truth for the symbolic machinery.

Four instruments, none of which share code with the exact-series path:

* Floquet exponent by monodromy integration of the Mathieu equation,
* characteristic values by the truncated Fourier (Hill) tridiagonal problem,
* Gauss-series evaluation of 2F1,
* contour quadrature of the WKB densities around the cycle realizations.

Cycle realizations (see notes in each function): the alpha cycle is the
non-contractible period of the z-cylinder, realized as the straight real-axis
integral over one period (w > 1); the beta cycle is a closed loop around the
turning-point cut (|w| < 1), with the paper's normalization being half the
loop, and with turning-point residues removed for odd densities.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .wkb import BranchContinuityError, TurningPointError, wkb_density

BAND_EDGE_TOL = 1e-10


class IntegrationError(RuntimeError):
    """ODE integrator failed; message carries step diagnostics."""


class ConvergenceError(RuntimeError):
    """Hill truncation K too small for the requested accuracy."""


@dataclass(frozen=True)
class FloquetResult:
    """A computed Floquet exponent with provenance and error gauge."""

    nu: complex
    method: str
    stable: bool
    est_error: float
    band_edge: bool = False

    def to_dict(self) -> dict:
        nu = self.nu
        return {
            "nu": nu if isinstance(nu, float) else [nu.real, nu.imag],
            "method": self.method,
            "stable": self.stable,
            "est_error": self.est_error,
            "band_edge": self.band_edge,
        }


@dataclass(frozen=True)
class MonodromySetup:
    lam: float
    q: float
    tol: float = 1e-12
    max_steps: int = 100_000

    def __post_init__(self):
        if not (0 < self.tol <= 1e-6):
            raise ValueError("tolerance must lie in (0, 1e-6]")


def monodromy_trace(lam: float, q: float, tol: float = 1e-12, max_steps: int = 100_000) -> float:
    """Trace of the transfer matrix over one period: u1(pi) + u2'(pi)."""

    def rhs(z, y):
        f = -(lam - 2.0 * q * math.cos(2.0 * z))
        return [y[1], f * y[0], y[3], f * y[2]]

    sol = solve_ivp(
        rhs,
        (0.0, math.pi),
        [1.0, 0.0, 0.0, 1.0],
        method="DOP853",
        rtol=tol,
        atol=tol,
        t_eval=[math.pi],
    )
    if not sol.success:
        raise IntegrationError(
            f"DOP853 failed at lam={lam}, q={q}: {sol.message}; "
            f"nfev={sol.nfev}, status={sol.status}"
        )
    if sol.nfev > max_steps:
        raise IntegrationError(f"step budget exceeded: nfev={sol.nfev} > {max_steps}")
    u1, _du1, _u2, du2 = sol.y[:, -1]
    return float(u1 + du2)


def _nearest_branch(theta: float, ref: float) -> float:
    """Representative of {2k +- theta} nearest ref; ties break positive."""
    k = round((ref - theta) / 2.0)
    cands = {2 * k + theta, 2 * k - theta, 2 * (k + 1) - theta, 2 * (k - 1) + theta}
    return min(cands, key=lambda c: (abs(c - ref), -c))


def monodromy_nu(s: MonodromySetup, branch_ref: float | None = None,
                 homotopy_steps: int | None = None) -> FloquetResult:
    """Floquet exponent from the monodromy trace, branch continuous from q -> 0.

    The trace fixes nu only up to {+-nu + 2Z}.  The even-integer window k is
    tracked by a homotopy in q from the free equation (nu = sqrt(lam)); the
    +-theta family inside the window is decided by the sign of dT/dlambda,
    since T' = -2 pi sin(pi nu) nu'(lambda) and nu'(lambda) > 0 inside bands.
    |T| ~ 2 within BAND_EDGE_TOL at the endpoint: nearest integer with the
    band-edge flag.  |T| > 2 there: complex exponent, stability flag off.
    """
    est = 10.0 * s.tol
    if branch_ref is not None:
        ref = branch_ref
    else:
        ref = math.sqrt(max(s.lam, 0.0))
        if homotopy_steps is None:
            homotopy_steps = max(4, min(60, int(math.ceil(2.0 * s.q))))
        for qi in [s.q * t / homotopy_steps for t in range(1, homotopy_steps)]:
            Ti = monodromy_trace(s.lam, qi, max(s.tol, 1e-10), s.max_steps)
            if abs(Ti) <= 2.0:
                ref = _nearest_branch(math.acos(Ti / 2.0) / math.pi, ref)
            else:
                want_even = Ti > 0
                gap_k = round(ref)
                if (int(gap_k) % 2 == 0) != want_even:
                    gap_k += 1 if ref >= gap_k else -1
                ref = float(gap_k)
    T = monodromy_trace(s.lam, s.q, s.tol, s.max_steps)
    if abs(abs(T) - 2.0) < BAND_EDGE_TOL:
        nu = float(round(ref))
        want_even = T > 0
        if (int(nu) % 2 == 0) != want_even:
            nu = nu + 1 if ref >= nu else nu - 1
        return FloquetResult(nu, "monodromy", True, math.sqrt(est), band_edge=True)
    if abs(T) <= 2.0:
        theta = math.acos(T / 2.0) / math.pi
        h = 1e-2 * max(1.0, abs(s.lam)) ** 0.5
        dT = (
            monodromy_trace(s.lam + h, s.q, max(s.tol, 1e-11), s.max_steps)
            - monodromy_trace(s.lam - h, s.q, max(s.tol, 1e-11), s.max_steps)
        ) / (2.0 * h)
        # sin(pi nu) > 0 <=> nu = 2k + theta form <=> T' < 0
        plus_family = dT < 0
        k = round((ref - theta) / 2.0) if plus_family else round((ref + theta) / 2.0)
        nu = 2 * k + theta if plus_family else 2 * k - theta
        # keep the representative nearest the tracked window
        for kk in (k - 1, k + 1):
            cand = 2 * kk + theta if plus_family else 2 * kk - theta
            if abs(cand - ref) < abs(nu - ref):
                nu = cand
        if nu < 0:
            nu = -nu  # class representative >= 0
        return FloquetResult(float(nu), "monodromy", True, est)
    kappa = math.acosh(abs(T) / 2.0)
    base = 0.0 if T > 0 else 1.0
    return FloquetResult(complex(base, kappa / math.pi), "monodromy", False, est)


def characteristic_lambda_near(nu_target: float, q: float, lam_seed: float,
                               width: float = 1.0, tol: float = 1e-12) -> float:
    """Root-solve the monodromy trace for cos(pi nu_target) near lam_seed."""
    goal = 2.0 * math.cos(math.pi * nu_target)

    def f(lam):
        return monodromy_trace(lam, q, tol) - goal

    a, b = lam_seed - width, lam_seed + width
    fa, fb = f(a), f(b)
    grow = 0
    while fa * fb > 0 and grow < 12:
        a -= width
        b += width
        fa, fb = f(a), f(b)
        grow += 1
    if fa * fb > 0:
        raise IntegrationError(
            f"no trace root bracketing lam={lam_seed} for nu={nu_target}, q={q}"
        )
    return float(brentq(f, a, b, xtol=1e-13, rtol=8.9e-16))


def hill_char_value(nu: float, q: float, K: int = 40, track_steps: int = 24) -> float:
    """Characteristic value from the truncated Fourier recurrence.

    Assembles the (2K+1)-point symmetric tridiagonal matrix with diagonal
    (nu+2k)^2 and off-diagonal q, then follows the eigenvalue continuing from
    nu^2 at q=0 by eigenvector overlap along a q homotopy.  Integer nu is
    resonant (two diagonal entries collide); the mean of the split pair is
    returned with a warning.
    """
    if K < 20:
        raise ValueError("Hill truncation K must be >= 20")
    is_int = abs(nu - round(nu)) < 1e-12

    def tracked(KK: int) -> float:
        kk = np.arange(-KK, KK + 1)
        diag = (nu + 2.0 * kk) ** 2
        if q == 0:
            return float(nu * nu)
        if is_int:
            n = int(round(abs(nu)))
            # resonant pair: indices k=0 and k=-n collide; average both branches
            w_, v_ = eigh_tridiagonal(diag, q * np.ones(2 * KK))
            order = np.argsort(np.abs(w_ - nu * nu))
            pair = w_[order[:2]] if n > 0 else w_[order[:1]]
            return float(np.mean(pair))
        vec = np.zeros(2 * KK + 1)
        vec[KK] = 1.0
        lam = nu * nu
        for qi in np.linspace(0.0, q, track_steps + 1)[1:]:
            w_, v_ = eigh_tridiagonal(diag, qi * np.ones(2 * KK))
            idx = int(np.argmax(np.abs(v_.T @ vec)))
            lam = float(w_[idx])
            vec = v_[:, idx]
        return lam

    if is_int:
        warnings.warn(
            f"integer Floquet exponent nu={nu}: resonant pair averaged",
            RuntimeWarning,
            stacklevel=2,
        )
    lam = tracked(K)
    lam_check = tracked(K + 10)
    if abs(lam - lam_check) > 1e-10 * max(1.0, abs(lam)):
        raise ConvergenceError(
            f"Hill eigenvalue not converged: K={K} vs K+10 differ by {abs(lam - lam_check):.3e}"
        )
    return lam_check


def hill_eigenvalues_near(nu: float, q: float, lam_seed: float, count: int = 1, K: int = 60):
    """Eigenvalues of the nu-class Hill matrix closest to lam_seed."""
    kk = np.arange(-K, K + 1)
    w_, _ = eigh_tridiagonal((nu + 2.0 * kk) ** 2, q * np.ones(2 * K))
    order = np.argsort(np.abs(w_ - lam_seed))
    return [float(w_[i]) for i in order[:count]]


def hyp2f1(a: float, b: float, c: float, z: complex, tol: float = 1e-14) -> complex:
    """Gauss series for 2F1 with a geometric tail bound; needs |z| < 1."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError(f"|z| = {abs(z):.4f} >= 1: Gauss series diverges")
    total = 1.0 + 0j
    term = 1.0 + 0j
    k = 0
    r = abs(z)
    while True:
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        k += 1
        if k > 10:
            # once the coefficient ratio is below 1, the tail is geometric
            ratio = abs((a + k) * (b + k) / ((c + k) * (k + 1.0))) * r
            if ratio < 1.0 and abs(term) * ratio / (1.0 - ratio) < tol:
                return total
        if k > 100_000:
            raise RuntimeError("2F1 series did not meet the tail bound")


def alpha_period_p0(w: float) -> float:
    """Closed form (1/pi) * alpha-period of p_0 for w > 1 via 2F1."""
    return math.sqrt(2.0 * (w + 1.0)) * hyp2f1(-0.5, 0.5, 1.0, 2.0 / (w + 1.0)).real


def beta_period_p0(w: float) -> complex:
    """Closed form (1/(i pi)) * beta-period of p_0 near w = 1 via 2F1."""
    return 0.5 * (w - 1.0) * hyp2f1(0.5, 0.5, 2.0, (1.0 - w) / 2.0)


# ---------------------------------------------------------------------------
# contour quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContourSpec:
    """Cycle realization for quadrature.

    alpha: straight line over one period on the real axis (w > 1 only).
    beta: closed loop around the cut (-arccos(w)/2, arccos(w)/2), |w| < 1;
    shape 'ellipse' (default, smooth parametrization, spectral trapezoid) or
    'stadium' (two straights + semicircular caps).
    """

    cycle: str
    w: complex
    half_height: float = 0.0
    nodes: int = 4096
    shape: str = ""
    clearance: float = 0.25

    def __post_init__(self):
        if self.cycle not in ("alpha", "beta"):
            raise ValueError(f"unknown cycle {self.cycle!r}")
        if self.nodes < 256 or self.nodes % 2:
            raise ValueError("node count must be even and >= 256")
        hh = self.half_height or (0.5 if self.cycle == "alpha" else 0.35)
        object.__setattr__(self, "half_height", hh)
        object.__setattr__(self, "shape", self.shape or ("line" if self.cycle == "alpha" else "ellipse"))
        if self.cycle == "alpha" and self.shape != "line":
            raise ValueError("alpha cycle is realized as a period line")
        if self.cycle == "beta" and self.shape not in ("ellipse", "stadium"):
            raise ValueError("beta shape must be 'ellipse' or 'stadium'")
        self._check_turning_distance()

    def _check_turning_distance(self):
        w = complex(self.w)
        zt = 0.5 * cmath.acos(w)
        if self.cycle == "alpha":
            if w.real <= 1.0:
                raise ValueError("alpha period-line realization requires Re w > 1")
            # turning points +-zt + k*pi must keep clear of the real axis
            if abs(zt.imag) < self.half_height / 2.0:
                raise ValueError("turning points too close to the alpha line")
        else:
            if abs(w) >= 1.0:
                raise ValueError(
                    "beta loop realization requires |w| < 1 (cut near the real axis)"
                )
            if self.half_height < 1e-3:
                raise ValueError("half-height too small")
            if abs(zt.imag) > 0.7 * self.half_height:
                raise ValueError("cut endpoints leave the loop's vertical reach")


def _beta_path(spec: ContourSpec):
    """Closed counterclockwise path nodes and dz weights around the beta cut."""
    w = complex(spec.w)
    zt = 0.5 * cmath.acos(w)
    a = abs(zt.real) + spec.clearance
    b = spec.half_height
    other = math.pi - abs(zt.real)  # nearest excluded turning points at +-(pi - zt)
    if a >= other - 0.05:
        raise ValueError("contour would swallow the neighbouring turning points")
    if (zt.real / a) ** 2 + (zt.imag / b) ** 2 > 0.85:
        raise ValueError("cut endpoints too close to the loop; enlarge it")
    M = spec.nodes
    if spec.shape == "ellipse":
        t = 2.0 * np.pi * np.arange(M) / M
        z = a * np.cos(t) + 1j * b * np.sin(t)
        dz = (-a * np.sin(t) + 1j * b * np.cos(t)) * (2.0 * np.pi / M)
        return z, dz
    # stadium: straights at +-ib over [-a, a], semicircular caps of radius b;
    # midpoint sampling per piece avoids junction error from spacing changes
    straight = 2.0 * a
    cap = math.pi * b
    per = 2.0 * straight + 2.0 * cap
    m_straight = max(8, int(round(M * straight / per)))
    m_cap = max(8, (M - 2 * m_straight) // 2)
    zs = []
    dzs = []
    h = 2.0 * a / m_straight
    x = -a + h * (np.arange(m_straight) + 0.5)
    zs.append(x - 1j * b)
    dzs.append(np.full(m_straight, h, dtype=complex))
    dth = np.pi / m_cap
    th = -np.pi / 2 + dth * (np.arange(m_cap) + 0.5)
    zs.append(a + b * np.exp(1j * th))
    dzs.append(1j * b * np.exp(1j * th) * dth)
    zs.append(x[::-1] + 1j * b)
    dzs.append(np.full(m_straight, -h, dtype=complex))
    zs.append(-a + b * np.exp(1j * (th + np.pi)))
    dzs.append(1j * b * np.exp(1j * (th + np.pi)) * dth)
    z = np.concatenate(zs)
    dz = np.concatenate(dzs)
    # anchor the branch start on the positive real axis right of the cut, so the
    # principal value at the first node picks the same sheet for every shape
    start = int(np.argmax(z.real - np.abs(z.imag)))
    return np.roll(z, -start), np.roll(dz, -start)


def _continue_P(w, z):
    vals = 2.0 * (complex(w) - np.cos(2.0 * z))
    roots = np.sqrt(vals.astype(complex))
    out = np.empty_like(roots)
    prev = roots[0]
    out[0] = prev
    for i in range(1, len(roots)):
        r = roots[i]
        if abs(r - prev) > abs(-r - prev):
            r = -r
        if abs(r - prev) > 0.5 * abs(r):
            raise BranchContinuityError(
                f"branch continuation jump at node {i}; increase nodes or move the contour"
            )
        out[i] = r
        prev = r
    return out


def _turning_residue_sum(m: int, w: complex, radius: float = 0.04, nodes: int = 256):
    """sum of residues of p_m at the two enclosed turning points, by tiny circles.

    Only meaningful for odd m, where p_m is single-valued and meromorphic at
    the turning points.
    """
    zt = 0.5 * cmath.acos(complex(w))
    dens = wkb_density(m)
    total = 0j
    for z0 in (zt, -zt):
        t = 2.0 * np.pi * np.arange(nodes) / nodes
        z = z0 + radius * np.exp(1j * t)
        dz = 1j * radius * np.exp(1j * t) * (2.0 * np.pi / nodes)
        P = _continue_P(w, z)
        vals = dens.evaluate(w, z, P)
        total += np.sum(vals * dz) / (2j * np.pi)
    return total


def contour_integral_pm(m: int, spec: ContourSpec) -> complex:
    """Cycle integral of p_m dz in the paper's normalization.

    alpha (w>1): real-line integral over one period (periodic trapezoid,
    spectrally accurate).  beta (|w|<1): half the closed loop around the cut;
    for odd m the loop also carries the turning-point residue term (the
    winding of the WKB amplitude), which the cycle period discards, so it is
    measured on small circles and removed.
    """
    w = complex(spec.w)
    dens = wkb_density(m)
    if spec.cycle == "alpha":
        M = spec.nodes
        x = -math.pi / 2.0 + math.pi * np.arange(M) / M
        vals_sq = 2.0 * (w - np.cos(2.0 * x))
        if np.any(np.abs(vals_sq) < 1e-14):
            raise TurningPointError("alpha line passes through a turning point")
        P = np.sqrt(vals_sq.astype(complex))
        vals = dens.evaluate(w, x, P)
        return complex(np.sum(vals) * (math.pi / M))
    z, dz = _beta_path(spec)
    P = _continue_P(w, z)
    # closure check: continue one more step back to the start
    r0 = P[0]
    rn = P[-1]
    r_back = np.sqrt(2.0 * (w - np.cos(2.0 * z[0])))
    if abs(r_back - rn) > abs(-r_back - rn):
        r_back = -r_back
    if abs(r_back - r0) > 1e-6 * abs(r0):
        raise BranchContinuityError("branch did not close around the beta loop")
    vals = dens.evaluate(w, z, P)
    loop = complex(np.sum(vals * dz))
    half = loop / 2.0
    if m % 2 == 1:
        # residues enter the loop as 2*pi*i * sum, hence pi*i * sum in the half loop
        half -= 1j * math.pi * complex(_turning_residue_sum(m, w))
    return half


# ---------------------------------------------------------------------------
# numeric differentiation of cycle periods
# ---------------------------------------------------------------------------

def nth_derivatives_cauchy(f, w0: float, n_max: int, radius: float, nodes: int = 64):
    """f^(k)(w0) for k = 0..n_max via the Cauchy integral on a circle (trapezoid)."""
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    ws = w0 + radius * np.exp(1j * th)
    fv = np.array([f(complex(ww)) for ww in ws], dtype=complex)
    out = []
    fact = 1.0
    for k in range(n_max + 1):
        if k:
            fact *= k
        out.append(complex(np.mean(fv * np.exp(-1j * k * th)) / radius ** k * fact))
    return out


def _central_weights(n: int, half: int):
    """Weights for the n-th derivative on the integer grid -half..half."""
    xs = np.arange(-half, half + 1, dtype=float)
    A = np.vander(xs, increasing=True).T
    b = np.zeros(len(xs))
    b[n] = math.factorial(n)
    return xs, np.linalg.solve(A, b)


def nth_derivative_fd(f, w0: float, n: int, h: float, richardson: bool = True):
    """n-th derivative by central differences (accuracy order >= 4), optionally
    Richardson-extrapolated with a second grid at 2h/3."""
    half = (n + 3) // 2 + 1
    xs, wts = _central_weights(n, half)
    p = 2 * half + 1 - n  # leading truncation-error order (even)
    p -= p % 2

    def stencil_eval(hh):
        return sum(wt * f(w0 + x * hh) for wt, x in zip(wts, xs) if abs(wt) > 1e-30) / hh ** n

    d1 = stencil_eval(h)
    if not richardson:
        return d1
    r = 1.5
    d2 = stencil_eval(h / r)
    return (r ** p * d2 - d1) / (r ** p - 1.0)
