"""Effective coupling constants and frequency shifts.

Four families of closed-form or recursive constants are evaluated here:

* the weak-modulation recursion for the couplings ``h_k``, ``f_k`` and the
  Bell-polynomial resummation into the resonance amplitudes ``eps_k``;
* the strong-modulation (Bessel) couplings of a single modulated system;
* the intensity-dependent shifts ``I(eps)`` and ``I~_m(eps)`` of systems with
  a nonlinear coupling ``g [X+ f(X0) + f(X0) X-]``;
* the constants of two coupled systems (modulated parametric amplifier and
  the two-atom vacuum-field model).

The symbol "epsilon" means different things in different families, so every
function names its dimensionless modulation index explicitly:

===================  =========================================
family               modulation index
===================  =========================================
weak recursion       none (small ratios g / (omega + k nu))
strong modulation    ``2 * g0 / nu``
nonlinear/amplifier  ``omega * gamma / nu``
two-atom             ``g0 / nu``
===================  =========================================
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
from scipy import special

from .exceptions import CapacityError, ParameterError, ResonanceError, StrongCouplingError

__all__ = [
    "KMAX_CAP",
    "CoefficientTable",
    "StrongModTable",
    "complete_bell",
    "weak_recursion",
    "maintext_h",
    "small_rotation_angle",
    "bessel_series",
    "strong_mod_table",
    "nonlinear_I",
    "tilde_I_m",
    "amplifier_constants",
    "amplifier_nu_star",
    "two_atom_constants",
]

KMAX_CAP = 24
# Relative width of the neighbourhood in which a retained denominator counts as resonant.
RESONANCE_RTOL = 1e-9


def _check_sign(sign) -> int:
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 (su(2)) or -1 (su(1,1)), got {sign!r}")
    return int(sign)


def complete_bell(a, n: int):
    """Complete Bell polynomials ``B_0 .. B_n`` evaluated at ``a``.

    Uses ``B_{m+1} = sum_k C(m, k) B_{m-k} a_{k+1}`` with ``B_0 = 1``.  Entries
    of ``a`` may be floats or :class:`fractions.Fraction` (exact arithmetic is
    preserved; the result is then an object array).

    Parameters
    ----------
    a : sequence
        ``a[0]`` is ``a_1``, ``a[1]`` is ``a_2`` and so on; at least ``n``
        entries.
    n : int
    """
    if n < 0:
        raise ParameterError(f"n must be non-negative, got {n}")
    a = list(a)
    if len(a) < n:
        raise ParameterError(f"need at least {n} arguments, got {len(a)}")
    one = a[0] ** 0 if a else 1.0
    b = [one]
    for m in range(n):
        b.append(sum(comb(m, k) * b[m - k] * a[k] for k in range(m + 1)))
    exact = any(not isinstance(x, (float, int, np.floating, np.integer)) for x in b)
    return np.array(b, dtype=object if exact else float)


@dataclass(frozen=True)
class CoefficientTable:
    """Output of :func:`weak_recursion`.

    All arrays have length ``kmax + 1`` and are indexed by ``k`` directly;
    entry 0 of ``h``, ``f``, ``delta`` and ``a`` is unused and set to zero,
    while ``eps[0] == 1``.
    """

    sign: int
    omega: float
    nu: float
    g0: float
    g1: float
    kmax: int
    h: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    eps: np.ndarray = field(repr=False)
    index_definition: str = "none (weak modulation: ratios g/(omega + k nu))"

    def g_eff(self, k: int) -> float:
        """Coupling ``g1 * eps_k`` of the ``(k+1)``-th resonance."""
        return float(self.g1 * self.eps[k])


def weak_recursion(sign, omega, nu, g0, g1, kmax) -> CoefficientTable:
    """Evaluate the weak-modulation recursion for ``h_k, f_k, delta_k, a_k, eps_k``.

    Recurrences (upper sign su(2), lower sign su(1,1))::

        h_1 = g0,  f_1 = g1
        h_k = +-2 g1 f_{k-1} / (omega + (k-1) nu)
        f_{2k+1} = -+h_{k+1}^2 / (4 g1) - sum_{m=1..k} h_m f_{2k+1-m} / (omega + (2k+1-m) nu)
        f_{2k}   = - sum_{m=1..k} h_m f_{2k-m} / (omega + (2k-m) nu)
        delta_k = h_k / (k nu),  a_k = -k! delta_k,  eps_k = B_k(a_1..a_k) / k!
    """
    sign = _check_sign(sign)
    kmax = int(kmax)
    if kmax > KMAX_CAP:
        raise CapacityError(f"kmax={kmax} exceeds the cap {KMAX_CAP}")
    if kmax < 0:
        raise ParameterError("kmax must be non-negative")
    _check_weak_params(omega, nu, g0, g1)

    h = np.zeros(kmax + 2)
    f = np.zeros(kmax + 2)
    h[1], f[1] = g0, g1
    for n in range(2, kmax + 1):
        h[n] = sign * 2.0 * g1 * f[n - 1] / (omega + (n - 1) * nu)
        if n % 2:
            k = (n - 1) // 2
            lead = sign * h[k + 1] ** 2 / (4.0 * g1) if g1 != 0 else 0.0
            f[n] = -lead - sum(h[m] * f[n - m] / (omega + (n - m) * nu) for m in range(1, k + 1))
        else:
            k = n // 2
            f[n] = -sum(h[m] * f[n - m] / (omega + (n - m) * nu) for m in range(1, k + 1))
    h, f = h[: kmax + 1], f[: kmax + 1]
    h[0] = f[0] = 0.0

    ks = np.arange(kmax + 1)
    delta = np.zeros(kmax + 1)
    delta[1:] = h[1:] / (ks[1:] * nu)
    a = np.array([-factorial(k) * delta[k] for k in ks])
    bell = complete_bell(a[1:], kmax)
    eps = np.array([bell[k] / factorial(k) for k in ks], dtype=float)
    return CoefficientTable(sign, float(omega), float(nu), float(g0), float(g1), kmax,
                            h, f, delta, a, eps)


def _check_weak_params(omega, nu, g0, g1):
    if not (omega > 0 and nu > 0):
        raise ParameterError(f"omega and nu must be positive (omega={omega}, nu={nu})")
    if g0 < 0 or g1 < 0:
        raise ParameterError(f"couplings must be non-negative (g0={g0}, g1={g1})")


def maintext_h(sign, omega, nu, g0, g1, kmax) -> np.ndarray:
    """``h_1 .. h_kmax`` from the closed recurrences that bypass ``f_k``.

    Returns an array of length ``kmax + 1`` indexed by ``k`` (entry 0 unused).
    """
    sign = _check_sign(sign)
    kmax = int(kmax)
    if kmax > KMAX_CAP:
        raise CapacityError(f"kmax={kmax} exceeds the cap {KMAX_CAP}")
    _check_weak_params(omega, nu, g0, g1)
    h = np.zeros(max(kmax + 1, 3))
    h[1] = g0
    h[2] = sign * 2.0 * g1 ** 2 / (omega + nu)
    for n in range(3, kmax + 1):
        if n % 2 == 0:
            k = (n - 2) // 2
            den = omega + (2 * k + 1) * nu
            h[n] = -h[k + 1] ** 2 / (2.0 * den) - sum(h[m] * h[n - m] for m in range(1, k + 1)) / den
        else:
            k = (n - 1) // 2
            den = omega + 2 * k * nu
            h[n] = -sum(h[m] * h[n - m] for m in range(1, k + 1)) / den
    out = h[: kmax + 1].copy()
    out[0] = 0.0
    return out


def small_rotation_angle(coupling, detuning, sign) -> float:
    """Angle ``eps`` of the rotation removing a counter-rotating term.

    Solves ``T(2 eps) = 2 coupling / detuning`` with ``T = tan`` for su(2) and
    ``T = tanh`` for su(1,1).
    """
    sign = _check_sign(sign)
    if detuning == 0:
        raise ResonanceError("detuning is zero: the term is resonant and cannot be rotated away")
    ratio = 2.0 * coupling / detuning
    if sign == 1:
        return 0.5 * float(np.arctan(ratio))
    if abs(ratio) >= 1:
        raise StrongCouplingError(
            f"|2 coupling / detuning| = {abs(ratio):.6g} >= 1: no su(1,1) small rotation exists")
    return 0.5 * float(np.arctanh(ratio))


def bessel_series(epsilon, tol=1e-16, weight_power=2, extra=0) -> np.ndarray:
    """``J_0(eps) .. J_K(eps)`` with ``K`` the first order past ``eps`` where
    ``|J_k| * k**weight_power < tol``; ``extra`` appends further orders."""
    k = 1
    while True:
        jk = special.jv(k, epsilon)
        if k > abs(epsilon) and abs(jk) * k ** weight_power < tol:
            break
        k += 1
    return special.jv(np.arange(k + 1 + int(extra)), epsilon)


def _resonant(diff, scale) -> bool:
    return abs(diff) < RESONANCE_RTOL * scale


@dataclass(frozen=True)
class StrongModTable:
    """Couplings and shifts of a single strongly modulated system.

    ``couplings[m]`` and ``shifts[m]`` are indexed by resonance order ``m``
    (entry 0 unused).  ``epsilon`` is the modulation index ``2 g0 / nu``.
    """

    sign: int
    omega: float
    nu: float
    g1: float
    epsilon: float
    couplings: np.ndarray = field(repr=False)
    shifts: np.ndarray = field(repr=False)
    bessel: np.ndarray = field(repr=False)
    shift_total: float = 0.0
    warnings: tuple = ()
    index_definition: str = "2*g0/nu"


def strong_mod_table(omega, nu, g0, g1, mmax, *, sign=1, epsilon=None,
                     extra_terms=0) -> StrongModTable:
    """Bessel couplings ``g_m`` and shifts ``I_{+-m}`` for strong modulation.

    ``g_m = (2 g1 / eps) (-1)^(m+1) m J_m(eps)`` with ``eps = 2 g0 / nu``
    unless ``epsilon`` is given directly.  Shift sums skip ``k = m``; any
    other index whose denominator ``omega - k nu`` is numerically resonant is
    dropped and reported in ``warnings``.
    """
    sign = _check_sign(sign)
    if not (omega > 0 and nu > 0):
        raise ParameterError("omega and nu must be positive")
    eps = 2.0 * g0 / nu if epsilon is None else float(epsilon)
    if not 0 < eps <= 10:
        raise ParameterError(f"modulation index must lie in (0, 10], got {eps}")
    j = bessel_series(eps, extra=extra_terms)
    kk = np.arange(len(j))
    scale = max(omega, nu)
    mmax = int(mmax)
    if mmax < 1:
        raise ParameterError("mmax must be at least 1")
    jm = special.jv(np.arange(mmax + 1), eps)
    couplings = np.zeros(mmax + 1)
    couplings[1:] = (2.0 * g1 / eps) * (-1.0) ** (np.arange(1, mmax + 1) + 1) * np.arange(1, mmax + 1) * jm[1:]

    shift_total = sign * 8.0 * g1 / eps ** 2 * np.sum(
        (g1 / (omega + kk[1:] * nu)) * kk[1:] ** 2 * j[1:] ** 2)

    notes = []
    shifts = np.zeros(mmax + 1)
    for m in range(1, mmax + 1):
        acc = 0.0
        for k in kk[1:]:
            if k == m:
                continue
            if _resonant(omega - k * nu, scale):
                notes.append(f"m={m}: excluded k={k} (omega - k*nu = {omega - k * nu:.3g})")
                continue
            acc += k ** 2 * j[k] ** 2 / (omega ** 2 - k ** 2 * nu ** 2)
        shifts[m] = sign * (16.0 * g1 ** 2 * omega / eps ** 2 * acc
                            + 8.0 * g1 ** 2 * m ** 2 * jm[m] ** 2 / (eps ** 2 * (omega + m * nu)))
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return StrongModTable(sign, float(omega), float(nu), float(g1), eps, couplings, shifts, j,
                          float(shift_total), tuple(notes))


def _check_positive(**kw):
    for name, val in kw.items():
        if not val > 0:
            raise ParameterError(f"{name} must be positive, got {val}")


def nonlinear_I(omega, nu, g, epsilon, *, extra_terms=0) -> float:
    """``I(eps) = g * sum_{k>=0} J_k(eps)^2 / (omega + k nu)``."""
    _check_positive(omega=omega, nu=nu)
    j = bessel_series(epsilon, tol=1e-18, weight_power=0, extra=extra_terms)
    k = np.arange(len(j))
    return float(g * np.sum(j ** 2 / (omega + k * nu)))


def tilde_I_m(omega, nu, g, epsilon, m, *, extra_terms=0) -> float:
    """Shift ``I~_m(eps)`` near the ``m``-th resonance ``omega ~ m nu``.

    ``g J_0^2 / omega + 2 g omega sum_{k>=1, k!=m} J_k^2 / (omega^2 - k^2 nu^2)
    + g J_m^2 / (omega + m nu)``.
    """
    _check_positive(omega=omega, nu=nu)
    j = bessel_series(epsilon, tol=1e-18, weight_power=0, extra=max(extra_terms, m))
    scale = max(omega, nu)
    acc = 0.0
    for k in range(1, len(j)):
        if k == m:
            continue
        if _resonant(omega - k * nu, scale):
            raise ResonanceError(f"near-resonant denominator omega - k*nu at k={k}")
        acc += j[k] ** 2 / (omega ** 2 - k ** 2 * nu ** 2)
    return float(g * j[0] ** 2 / omega + 2.0 * g * omega * acc + g * j[m] ** 2 / (omega + m * nu))


def amplifier_constants(omega_a, omega_b, nu, g, epsilon, *, kmax=6, extra_terms=0) -> dict:
    """Constants of the modulated parametric amplifier.

    ``epsilon`` is ``omega_a * gamma / nu``.  Returns a dict with

    ``g_eff``
        two-photon (``b^dag^2``) coupling near ``nu ~ 2 omega_b``;
    ``I_a``, ``I_b``
        shifts ``I(eps)`` evaluated at ``omega = omega_a + omega_b``;
    ``tilde_I_a``, ``tilde_I_b``
        dimensionless shifts near the two-photon resonances; terms with
        ``|omega_a +- omega_b| = n nu`` are excluded;
    ``eps1k``, ``eps2k``
        ``a^2`` and ``b^2`` sideband amplitudes for ``k = 1..kmax`` (entry 0
        unused);
    ``omega_b_shifted``
        ``omega_b - g * tilde_I_b``;
    ``nu_star``
        predicted two-photon resonance ``2 * omega_b_shifted``;
    ``nu_star_single_shift``
        the alternative ``2 omega_b - g tilde_I_b``.
    """
    _check_positive(omega_a=omega_a, omega_b=omega_b, nu=nu)
    j = bessel_series(epsilon, extra=max(extra_terms, kmax + 1))
    n = np.arange(len(j))
    scale = max(omega_a, omega_b, nu)
    wsum, wdiff = omega_a + omega_b, omega_a - omega_b

    geff = 0.0
    for l in n[:-1]:
        den = omega_a ** 2 - (omega_b + l * nu) ** 2
        if _resonant(omega_a - (omega_b + l * nu), scale) or _resonant(omega_a + omega_b + l * nu, scale):
            raise ResonanceError(f"g_eff: resonant denominator at l={l}")
        geff += (2 * l + 1) * j[l] * j[l + 1] / den
    geff *= 2.0 * g ** 2 * omega_b

    i_sum = g * float(np.sum(j ** 2 / (wsum + n * nu)))

    if _resonant(wdiff, scale):
        raise ResonanceError("omega_a == omega_b: the J_0 term of tilde_I is resonant")
    lead_a = 2.0 * g * omega_b * j[0] ** 2 / (omega_a ** 2 - omega_b ** 2)
    lead_b = 2.0 * g * omega_a * j[0] ** 2 / (omega_a ** 2 - omega_b ** 2)
    side_sum = side_a = side_b = 0.0
    for k in n[1:]:
        if not _resonant(wsum - k * nu, scale):
            side_sum += j[k] ** 2 * wsum / (wsum ** 2 - k ** 2 * nu ** 2)
        if not _resonant(abs(wdiff) - k * nu, scale):
            den = wdiff ** 2 - k ** 2 * nu ** 2
            side_a += j[k] ** 2 * (omega_b - omega_a) / den
            side_b += j[k] ** 2 * (omega_a - omega_b) / den
    tia = lead_a + 2.0 * g * side_sum + 2.0 * g * side_a
    tib = lead_b + 2.0 * g * side_sum + 2.0 * g * side_b

    eps1 = np.zeros(kmax + 1)
    eps2 = np.zeros(kmax + 1)
    for k in range(1, kmax + 1):
        l = n[: len(j) - k]
        terms = j[l] * j[l + k] / (wsum + l * nu)
        eps1[k] = -g * np.sum((-1.0) ** (k + l) * terms)
        eps2[k] = -g * np.sum(terms)

    wb = omega_b - g * tib
    return {
        "epsilon": float(epsilon),
        "g_eff": float(geff),
        "I_a": i_sum,
        "I_b": i_sum,
        "tilde_I_a": float(tia),
        "tilde_I_b": float(tib),
        "eps1k": eps1,
        "eps2k": eps2,
        "omega_b_shifted": float(wb),
        "nu_star": float(2.0 * wb),
        "nu_star_single_shift": float(2.0 * omega_b - g * tib),
    }


def amplifier_nu_star(omega_a, omega_b, g, epsilon, *, tol=1e-13, maxiter=50, **kw) -> dict:
    """:func:`amplifier_constants` at the self-consistent ``nu = nu_star(nu)``.

    The shifts depend weakly on ``nu`` through their denominators; the fixed
    point is reached by direct iteration from ``nu = 2 omega_b``.
    """
    nu = 2.0 * omega_b
    for _ in range(maxiter):
        c = amplifier_constants(omega_a, omega_b, nu, g, epsilon, **kw)
        if abs(c["nu_star"] - nu) <= tol * nu:
            return c
        nu = c["nu_star"]
    raise ResonanceError(f"nu_star iteration did not converge (last nu={nu!r})")


def two_atom_constants(omega_1, omega_2, omega_c, nu=None, g0=1.0, g1=1.0, g2=1.0) -> dict:
    """Constants of two atoms coupled through a vacuum cavity mode.

    ``omega~_i = omega_i + g_i (eps_1i + delta_1i)`` with
    ``eps_1i = g_i / (omega_c + omega_i)`` and ``delta_1i = g_i / (omega_i - omega_c)``;
    the joint-excitation resonance is ``nu* = omega~_1 + omega~_2`` and the
    coupling is ``(g0 / nu) (g1 eps_12 + g2 eps_11 - g1 delta_12 - g2 delta_11)``,
    with ``nu`` defaulting to ``nu*``.
    """
    _check_positive(omega_1=omega_1, omega_2=omega_2, omega_c=omega_c)
    for i, w in ((1, omega_1), (2, omega_2)):
        if w == omega_c:
            raise ResonanceError(f"omega_{i} equals omega_c: delta_1{i} is undefined")
    e11, e12 = g1 / (omega_c + omega_1), g2 / (omega_c + omega_2)
    d11, d12 = g1 / (omega_1 - omega_c), g2 / (omega_2 - omega_c)
    w1 = omega_1 + g1 * (e11 + d11)
    w2 = omega_2 + g2 * (e12 + d12)
    nu_star = w1 + w2
    nu_used = nu_star if nu is None else nu
    _check_positive(nu=nu_used)
    bracket = g1 * e12 + g2 * e11 - g1 * d12 - g2 * d11
    eps = g0 / nu_used
    return {
        "epsilon": eps,
        "bracket": bracket,
        "g_eff": eps * bracket,
        "omega_tilde_1": w1,
        "omega_tilde_2": w2,
        "nu_star": nu_star,
    }
