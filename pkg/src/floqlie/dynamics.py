"""Time-dependent Schroedinger integration for ``h_static + cos(nu t) h_mod``.

Stepping uses the fourth-order Magnus integrator with two Gauss nodes; each
step is an exact exponential of a Hermitian matrix, so unitarity is limited
only by rounding.  Because the Hamiltonian is periodic, the propagator over
one modulation period ``T`` is computed once and the state is advanced from
period to period by matrix-vector products; trajectories are therefore
sampled at ``t = 0, T, 2T, ...``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .exceptions import CapacityError, IntegratorError, LeakageError, ParameterError
from .liealg import DEFAULT_DIM_CAP

__all__ = [
    "PropagatorConfig",
    "Trajectory",
    "propagate",
    "period_propagator",
    "evolve_unitary",
    "evolve_state",
    "expectation_trajectory",
    "time_averaged_transition_probability",
    "quasienergies",
    "leakage",
]

_GAUSS = np.sqrt(3.0) / 6.0


@dataclass(frozen=True)
class PropagatorConfig:
    """Integration settings.

    ``t_final`` is rounded down to a whole number of modulation periods when
    trajectories are sampled.
    """

    t_final: float
    steps_per_period: int = 64
    unitarity_tol: float = 1e-8
    leakage_tol: float = 1e-3

    def __post_init__(self):
        if self.steps_per_period < 32:
            raise ParameterError(f"steps_per_period must be >= 32, got {self.steps_per_period}")
        if not (self.unitarity_tol > 0 and self.leakage_tol > 0):
            raise ParameterError("tolerances must be positive")
        if not self.t_final >= 0:
            raise ParameterError(f"t_final must be non-negative, got {self.t_final}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)


def _check_dim(model):
    if model.dim > DEFAULT_DIM_CAP:
        raise CapacityError(f"model dimension {model.dim} exceeds the cap {DEFAULT_DIM_CAP}")


def _step(model, comm, t, h) -> np.ndarray:
    t1 = t + h * (0.5 - _GAUSS)
    t2 = t + h * (0.5 + _GAUSS)
    c1, c2 = np.cos(model.nu * t1), np.cos(model.nu * t2)
    k = h * (model.h_static + 0.5 * (c1 + c2) * model.h_mod)
    # [H2, H1] = (c2 - c1) [h_mod, h_static]
    k = k - 1j * (np.sqrt(3.0) / 12.0) * h * h * (c2 - c1) * comm
    return expm(-1j * k)


def _commutator(model):
    return model.h_mod @ model.h_static - model.h_static @ model.h_mod


def propagate(model, t0, t1, n_steps) -> np.ndarray:
    """Propagator ``U(t1, t0)`` with ``n_steps`` equal Magnus steps.

    ``t1 < t0`` integrates backwards in time.
    """
    _check_dim(model)
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ParameterError("n_steps must be positive")
    h = (t1 - t0) / n_steps
    comm = _commutator(model)
    u = np.eye(model.dim, dtype=complex)
    for j in range(n_steps):
        u = _step(model, comm, t0 + j * h, h) @ u
    return u


def period_propagator(model, steps_per_period) -> np.ndarray:
    """Propagator over one modulation period starting at ``t = 0``."""
    return propagate(model, 0.0, model.period, steps_per_period)


def unitarity_defect(u) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def evolve_unitary(model, cfg: PropagatorConfig):
    """``U(t_final, 0)`` and its unitarity defect ``max |U^dag U - 1|``."""
    period = model.period
    n_per = int(np.floor(cfg.t_final / period + 1e-12))
    rem = cfg.t_final - n_per * period
    u = np.eye(model.dim, dtype=complex)
    if n_per:
        u = np.linalg.matrix_power(period_propagator(model, cfg.steps_per_period), n_per)
    if rem > 1e-12 * period:
        n_rem = int(np.ceil(rem / period * cfg.steps_per_period))
        u = propagate(model, n_per * period, cfg.t_final, n_rem) @ u
    defect = unitarity_defect(u)
    if defect >= cfg.unitarity_tol:
        raise IntegratorError(f"evolve_unitary: unitarity defect {defect:.3e} exceeds "
                              f"{cfg.unitarity_tol:.1e}", defect=defect)
    return u, defect


def _bosonic_factors(model):
    return [i for i, f in enumerate(model.space.factors) if f.kind.is_bosonic]


def leakage(model, psi) -> float:
    """Largest population held by the top two levels of any bosonic factor."""
    dims = model.space.factor_dims
    prob = (np.abs(psi) ** 2).reshape(dims)
    worst = 0.0
    for i in _bosonic_factors(model):
        marg = prob.sum(axis=tuple(j for j in range(len(dims)) if j != i))
        worst = max(worst, float(marg[-2:].sum()))
    return worst


def _block_size(dim) -> int:
    return int(max(1, min(64, 4_000_000 // (dim * dim))))


def _run(model, cfg, psi0, stride=1, measure=None):
    """Advance ``psi0`` period by period.

    Periods are processed in blocks: with ``P_j = U_T^j`` precomputed for
    ``j = 1..B`` the next ``B`` states are ``P_j psi`` in one batched product.
    ``measure`` maps a ``(n, dim)`` stack of states to ``n`` samples.
    """
    _check_dim(model)
    psi = np.asarray(psi0, dtype=complex).ravel()
    if psi.shape != (model.dim,):
        raise ParameterError(f"psi0 has length {psi.size}, model dimension is {model.dim}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ParameterError("psi0 must be normalized to 1 +- 1e-12")
    period = model.period
    n_per = int(np.floor(cfg.t_final / period + 1e-12))
    ut = period_propagator(model, cfg.steps_per_period)
    defect = unitarity_defect(ut)
    if defect * max(n_per, 1) >= cfg.unitarity_tol:
        raise IntegratorError(f"one-period propagator defect {defect:.3e} accumulates past "
                              f"{cfg.unitarity_tol:.1e} over {n_per} periods", defect=defect)
    measure = measure or (lambda states: states.copy())
    bosonic = _bosonic_factors(model)
    dims = model.space.factor_dims

    nb = min(_block_size(model.dim), max(n_per, 1))
    powers = np.empty((nb, model.dim, model.dim), dtype=complex)
    powers[0] = ut
    for j in range(1, nb):
        powers[j] = ut @ powers[j - 1]

    times = [np.zeros(1)]
    samples = [measure(psi[None, :])]
    done = 0
    while done < n_per:
        nblk = min(nb, n_per - done)
        states = powers[:nblk] @ psi
        idx = done + 1 + np.arange(nblk)
        if bosonic:
            prob = (np.abs(states) ** 2).reshape((nblk,) + dims)
            for i in bosonic:
                axes = tuple(1 + j for j in range(len(dims)) if j != i)
                top = prob.sum(axis=axes)[:, -2:].sum(axis=1)
                bad = np.nonzero(top >= cfg.leakage_tol)[0]
                if bad.size:
                    j = bad[0]
                    raise LeakageError(f"truncation leakage {top[j]:.3e} >= {cfg.leakage_tol:.1e} "
                                       f"at t={idx[j] * period:.6g}", leakage=float(top[j]),
                                       time=float(idx[j] * period))
        dev = np.abs(np.linalg.norm(states, axis=1) - 1.0)
        if np.max(dev) >= cfg.unitarity_tol:
            j = int(np.argmax(dev))
            raise IntegratorError(f"norm deviation {dev[j]:.3e} at t={idx[j] * period:.6g}",
                                  defect=float(dev[j]))
        keep = idx % stride == 0
        if np.any(keep):
            times.append(idx[keep] * period)
            samples.append(measure(states[keep]))
        psi = states[-1]
        done += nblk
    meta = {"label": model.label, "nu": model.nu, "t_final": cfg.t_final,
            "steps_per_period": cfg.steps_per_period, "period_defect": defect}
    return np.concatenate(times), np.concatenate(samples), meta


def evolve_state(model, cfg: PropagatorConfig, psi0, stride=1) -> Trajectory:
    """States at every ``stride``-th modulation period, starting at ``t = 0``."""
    times, samples, meta = _run(model, cfg, psi0, stride)
    return Trajectory(times, samples, meta)


def expectation_trajectory(model, cfg: PropagatorConfig, psi0, observable, stride=1) -> Trajectory:
    """Real expectation values of a Hermitian ``observable`` sampled per period."""
    obs = np.asarray(observable, dtype=complex)

    def measure(states):
        vals = np.einsum("ni,ni->n", states.conj(), states @ obs.T)
        bad = np.abs(vals.imag) > 1e-10 * np.maximum(1.0, np.abs(vals.real))
        if np.any(bad):
            raise ParameterError("observable has a complex expectation value; is it Hermitian?")
        return vals.real

    times, samples, meta = _run(model, cfg, psi0, stride, measure=measure)
    return Trajectory(times, samples, meta)


def time_averaged_transition_probability(model, cfg: PropagatorConfig, initial, final,
                                         check_stationarity=False) -> float:
    """Mean of ``|<final| U(t_j) |initial>|^2`` over ``t_j = T, 2T, ..., M T``.

    ``initial`` and ``final`` are flat basis indices.  With
    ``check_stationarity`` the window is also doubled and a warning is issued
    if the average moves by more than 5 %.
    """
    for name, idx in (("initial", initial), ("final", final)):
        if not 0 <= int(idx) < model.dim:
            raise ParameterError(f"{name} index {idx} outside 0..{model.dim - 1}")
    psi0 = np.zeros(model.dim, dtype=complex)
    psi0[int(initial)] = 1.0
    run_cfg = cfg
    if check_stationarity:
        run_cfg = PropagatorConfig(2 * cfg.t_final, cfg.steps_per_period, cfg.unitarity_tol,
                                   cfg.leakage_tol)
    times, probs, _ = _run(model, run_cfg, psi0, measure=lambda st: np.abs(st[:, int(final)]) ** 2)
    probs = probs[1:]
    if probs.size == 0:
        raise ParameterError("t_final is shorter than one modulation period")
    if not check_stationarity:
        return float(np.mean(probs))
    half = probs[: probs.size // 2]
    p_short, p_long = float(np.mean(half)), float(np.mean(probs))
    if p_short > 0 and abs(p_long - p_short) > 0.05 * p_short:
        warnings.warn(f"time average not stationary: {p_short:.4g} -> {p_long:.4g} on doubling "
                      f"the window", RuntimeWarning, stacklevel=2)
    return p_short


def quasienergies(model, steps_per_period=256) -> np.ndarray:
    """Floquet quasienergies in ``(-nu/2, nu/2]``, sorted."""
    ut = period_propagator(model, steps_per_period)
    phases = -np.angle(np.linalg.eigvals(ut)) / model.period
    return np.sort(phases)
