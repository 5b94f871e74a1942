"""Command-line front end.

Usage::

    floqlie <command> --model=<label> [--key=value ...] [--config=FILE] [--dump-config]

Commands are ``coeffs``, ``scan``, ``evolve``, ``compare`` and ``tables``.
A config file holds one ``key=value`` per line (``#`` starts a comment);
flags given on the command line override it.  ``--dump-config`` prints the
merged configuration in the same format and exits without computing.

Exit codes: 0 success, 2 configuration error, 3 numerical or I/O failure,
4 failed comparison.
"""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy import special

from . import coeffs, models
from .dynamics import PropagatorConfig, expectation_trajectory
from .exceptions import ConfigurationError, FloqlieError, ParameterError
from .liealg import AlgebraKind
from .resonance import compare, extract_rabi, scan_nu

__all__ = ["RunConfig", "parse_config", "run", "main", "write_csv", "format_config"]

COMMANDS = ("coeffs", "scan", "evolve", "compare", "tables")
MODELS = ("rabi", "parosc", "nonlinear", "amplifier", "dicke", "two_atom", "single")

FLOAT_KEYS = ("omega0", "omega1", "omega2", "omega_a", "omega_b", "omega_c", "nu", "nu_min",
              "nu_max", "nu_step", "g", "g0", "g1", "g2", "gamma", "epsilon_index", "spin",
              "t_final", "tolerance", "leakage_tol")
INT_KEYS = ("fock_a", "fock_b", "fock_c", "steps_per_period", "kmax")
STR_KEYS = ("initial", "final", "output", "algebra")
KEYS = FLOAT_KEYS + INT_KEYS + STR_KEYS + ("model",)

# Keys each model needs before anything runs; gamma/epsilon_index handled separately.
MODEL_KEYS = {
    "rabi": ("omega0", "g"),
    "single": ("algebra", "omega0", "g0", "g1"),
    "parosc": ("omega0",),
    "nonlinear": ("algebra", "omega0", "g"),
    "amplifier": ("omega_a", "omega_b", "g"),
    "dicke": ("omega0", "omega1", "g"),
    "two_atom": ("omega1", "omega2", "omega_c", "g0", "g1", "g2"),
}
MODULATED_BY_INDEX = ("parosc", "nonlinear", "amplifier", "dicke")
NEEDS_NU = {"coeffs": True, "evolve": True, "scan": False, "compare": False, "tables": False}


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str
    params: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def get(self, key, default=None):
        return self.params.get(key, default)

    def __contains__(self, key):
        return key in self.params


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _convert(key, raw):
    if key not in KEYS:
        raise ConfigurationError(f"unknown key '{key}'")
    raw = raw.strip()
    if key in FLOAT_KEYS:
        try:
            val = float(raw)
        except ValueError:
            raise ConfigurationError(f"key '{key}': expected a number, got {raw!r}") from None
        if not np.isfinite(val):
            raise ConfigurationError(f"key '{key}': value must be finite")
        return val
    if key in INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"key '{key}': expected an integer, got {raw!r}") from None
    if not raw:
        raise ConfigurationError(f"key '{key}': empty value")
    return raw


def read_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"config file {path}: {exc.strerror}") from None
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config file {path}, line {n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = _convert(key, val)
    return out


def _parser():
    p = argparse.ArgumentParser(prog="floqlie", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="file of key=value lines")
    p.add_argument("--dump-config", action="store_true", help="print the merged config and exit")
    for key in KEYS:
        p.add_argument(f"--{key}", dest=key, default=None)
    return p


def parse_config(argv) -> tuple:
    """``(RunConfig, dump_flag)`` from an argument list."""
    ns = _parser().parse_args(argv)
    merged = read_config_file(ns.config) if ns.config else {}
    for key in KEYS:
        raw = getattr(ns, key)
        if raw is not None:
            merged[key] = _convert(key, raw)
    model = merged.pop("model", None)
    if model is None:
        raise ConfigurationError("key 'model' is required")
    if model not in MODELS:
        raise ConfigurationError(f"key 'model': unknown model {model!r}; choose from {', '.join(MODELS)}")
    cfg = RunConfig(ns.command, model, MappingProxyType(dict(sorted(merged.items()))))
    return cfg, ns.dump_config


def format_config(cfg: RunConfig) -> str:
    lines = [f"# floqlie {cfg.command}", f"model={cfg.model}"]
    for key, val in cfg.params.items():
        lines.append(f"{key}={val!r}" if isinstance(val, float) else f"{key}={val}")
    return "\n".join(lines) + "\n"


def _require(cfg, keys, what):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigurationError(f"{what} requires key(s) {', '.join(repr(k) for k in missing)}")


def _modulation(cfg, nu, omega):
    """``(gamma, epsilon)`` with exactly one of them supplied."""
    has_g, has_e = "gamma" in cfg, "epsilon_index" in cfg
    if has_g == has_e:
        raise ConfigurationError(f"model {cfg.model}: give exactly one of 'gamma' and 'epsilon_index'")
    if cfg.model == "parosc":
        # small parameter g/omega = gamma/2
        return (cfg.get("gamma"), cfg.get("gamma") / 2) if has_g else (2 * cfg.get("epsilon_index"),
                                                                         cfg.get("epsilon_index"))
    if has_g:
        return cfg.get("gamma"), omega * cfg.get("gamma") / nu
    return cfg.get("epsilon_index") * nu / omega, cfg.get("epsilon_index")


def validate(cfg: RunConfig):
    """Check every key the command needs before any computation."""
    _require(cfg, MODEL_KEYS[cfg.model], f"model {cfg.model}")
    if cfg.model in MODULATED_BY_INDEX and cfg.command != "tables":
        if ("gamma" in cfg) == ("epsilon_index" in cfg):
            raise ConfigurationError(f"model {cfg.model}: give exactly one of 'gamma' and 'epsilon_index'")
    if cfg.get("algebra") is not None and cfg.get("algebra") not in ("su2", "su11", "h1"):
        raise ConfigurationError("key 'algebra' must be one of su2, su11, h1")
    if NEEDS_NU[cfg.command]:
        _require(cfg, ("nu",), f"command {cfg.command}")
    if cfg.command == "scan":
        _require(cfg, ("nu_min", "nu_max", "nu_step"), "command scan")
    if cfg.command == "compare":
        _require(cfg, ("tolerance",), "command compare")
        if not cfg.get("tolerance") > 0:
            raise ConfigurationError("key 'tolerance' must be positive")
        if not ("nu_min" in cfg or "nu" in cfg):
            raise ConfigurationError("command compare requires a scan grid (nu_min, nu_max, "
                                     "nu_step) or a fixed 'nu'")
    if cfg.command == "tables" and cfg.model not in ("rabi", "parosc"):
        raise ConfigurationError("command tables supports models rabi and parosc")
    for key in ("nu", "nu_min", "nu_max", "nu_step", "t_final"):
        if key in cfg and not cfg.get(key) > 0:
            raise ConfigurationError(f"key '{key}' must be positive")
    if "nu_min" in cfg:
        _require(cfg, ("nu_min", "nu_max", "nu_step"), "a scan grid")
        if cfg.get("nu_max") <= cfg.get("nu_min"):
            raise ConfigurationError("key 'nu_max' must exceed 'nu_min'")


# ---------------------------------------------------------------------------
# model assembly
# ---------------------------------------------------------------------------

def _kind(cfg, default_n=16):
    alg = cfg.get("algebra", "su2" if cfg.model == "rabi" else None)
    if alg == "su2":
        return AlgebraKind.su2(cfg.get("spin", 0.5))
    n = cfg.get("fock_a", default_n)
    return AlgebraKind.su11_boson(n) if alg == "su11" else AlgebraKind.h1(n)


def _echo(cfg, nu):
    """The modulation parameter derived from the one supplied, at ``nu``."""
    omega = {"parosc": "omega0", "nonlinear": "omega0", "amplifier": "omega_a", "dicke": "omega0"}
    if cfg.model not in omega:
        return {}
    gamma, eps = _modulation(cfg, nu, cfg.get(omega[cfg.model]))
    return {"epsilon_index": eps} if "gamma" in cfg else {"gamma": gamma}


def _builder(cfg):
    """``nu -> ModelSpec``."""
    m = cfg.model
    if m == "rabi":
        return lambda nu: models.build_semiclassical_rabi(cfg.get("spin", 0.5), cfg.get("omega0"),
                                                          nu, cfg.get("g"))
    if m == "single":
        kind = _kind(cfg)
        return lambda nu: models.build_single_modulated(kind, cfg.get("omega0"), nu, cfg.get("g0"),
                                                        cfg.get("g1"))
    if m == "two_atom":
        return lambda nu: models.build_two_atom(cfg.get("omega1"), cfg.get("omega2"),
                                                cfg.get("omega_c"), nu, cfg.get("g0"), cfg.get("g1"),
                                                cfg.get("g2"), cfg.get("fock_c", 6))

    omega = {"parosc": "omega0", "nonlinear": "omega0", "amplifier": "omega_a", "dicke": "omega0"}[m]

    def gamma_at(nu):
        return _modulation(cfg, nu, cfg.get(omega))[0]

    if m == "parosc":
        return lambda nu: models.build_parametric_oscillator(cfg.get("omega0"), gamma_at(nu), nu,
                                                             cfg.get("fock_a", 16))
    if m == "nonlinear":
        kind = _kind(cfg)
        return lambda nu: models.build_nonlinear(kind, cfg.get("omega0"), gamma_at(nu), nu,
                                                 cfg.get("g"))
    if m == "amplifier":
        return lambda nu: models.build_amplifier(cfg.get("omega_a"), cfg.get("omega_b"), nu,
                                                 gamma_at(nu), cfg.get("g"), cfg.get("fock_a", 8),
                                                 cfg.get("fock_b", 30))
    return lambda nu: models.build_dicke_modulated(cfg.get("spin", 0.5), cfg.get("omega0"),
                                                   cfg.get("omega1"), nu, gamma_at(nu), cfg.get("g"),
                                                   cfg.get("fock_a", 16))


_LABELS = {
    "amplifier": re.compile(r"^(\d+)a(\d+)b$"),
    "two_atom": re.compile(r"^([ge])([ge])(\d+)$"),
    "dicke": re.compile(r"^([ge])(\d+)$"),
}


def basis_index(model_spec, label, key):
    """Flat index of a basis label (see the module docs) or a plain integer."""
    label = str(label)
    if label.isdigit():
        idx = int(label)
        if idx >= model_spec.dim:
            raise ConfigurationError(f"key '{key}': index {idx} outside 0..{model_spec.dim - 1}")
        return idx
    pat = _LABELS.get(model_spec.label)
    match = pat.match(label) if pat else None
    if match is None:
        raise ConfigurationError(f"key '{key}': cannot parse basis label {label!r} for model "
                                 f"{model_spec.label}")
    dims = model_spec.space.factor_dims
    levels = []
    for tok, d, fac in zip(match.groups(), dims, model_spec.space.factors):
        if tok in "ge":
            # spin factors are ordered from the top level m = S down
            levels.append(0 if tok == "e" else d - 1)
        else:
            n = int(tok)
            if n >= d:
                raise ConfigurationError(f"key '{key}': level {n} exceeds truncation {d} of factor "
                                         f"{fac.kind}")
            levels.append(n)
    return model_spec.space.basis_index(levels)


_DEFAULT_PROBE = {"amplifier": ("0a0b", "0a2b"), "two_atom": ("gg0", "ee0"), "dicke": ("e0", "g1")}


def _probe(cfg, spec):
    init_d, fin_d = _DEFAULT_PROBE.get(spec.label, (None, None))
    if init_d is None:
        init_d = str(_ground(spec))
    init = basis_index(spec, cfg.get("initial", init_d), "initial")
    if cfg.get("final", fin_d) is None:
        return init, None
    return init, basis_index(spec, cfg.get("final", fin_d), "final")


def _ground(spec):
    kind = spec.space.factors[0].kind
    return spec.dim - 1 if not kind.is_bosonic else 0


def _default_observable(spec):
    lift = spec.space.lifted
    if spec.label == "amplifier":
        return lift[1].x_zero, "n_b"
    if spec.label == "parosc":
        kz = lift[0].x_zero
        return 2.0 * kz - 0.5 * np.eye(spec.dim), "n"
    return lift[0].x_zero, "x0"


def _predicted_rabi(cfg, nu):
    """``(Omega, description)`` predicted for the targeted transition."""
    m = cfg.model
    if m == "two_atom":
        c = coeffs.two_atom_constants(cfg.get("omega1"), cfg.get("omega2"), cfg.get("omega_c"), nu,
                                      cfg.get("g0"), cfg.get("g1"), cfg.get("g2"))
        return 2.0 * abs(c["g_eff"]), "two_atom_constants"
    if m == "amplifier":
        _, eps = _modulation(cfg, nu, cfg.get("omega_a"))
        c = coeffs.amplifier_constants(cfg.get("omega_a"), cfg.get("omega_b"), nu, cfg.get("g"), eps)
        return 2.0 * abs(c["g_eff"]), "amplifier_constants"
    if m == "dicke":
        _, eps = _modulation(cfg, nu, cfg.get("omega0"))
        return 2.0 * abs(cfg.get("g") * special.j0(eps)), "g J0(eps)"
    if m in ("rabi", "single"):
        omega = cfg.get("omega0")
        order = int(round(omega / nu))
        g0 = 0.0 if m == "rabi" else cfg.get("g0")
        g1 = cfg.get("g") if m == "rabi" else cfg.get("g1")
        sign = 1 if m == "rabi" else _kind(cfg).sign
        if order < 1:
            raise ConfigurationError("key 'nu': no resonance omega0 ~ k nu with k >= 1")
        tab = coeffs.weak_recursion(sign, omega, nu, g0, g1, order - 1)
        return 2.0 * abs(tab.g_eff(order - 1)), f"weak_recursion k={order - 1}"
    raise ConfigurationError(f"model {m}: no Rabi-frequency prediction; give 't_final'")


def _t_final(cfg, nu):
    if "t_final" in cfg:
        return cfg.get("t_final")
    omega, _ = _predicted_rabi(cfg, nu)
    if omega <= 0:
        raise ConfigurationError("predicted coupling vanishes; give 't_final'")
    if cfg.model == "amplifier":
        # squeezing grows without bound: stop at 2 g_eff t = 1
        return 1.0 / omega
    return 6.0 * 2.0 * np.pi / omega


# At the default N_c = 6 a truncation-induced cavity resonance near nu = 40.1
# puts ~8e-3 in the top two photon levels; the peak itself is unaffected.
_DEFAULT_LEAKAGE = {"two_atom": 1e-2}


def _propagator_cfg(cfg, nu):
    return PropagatorConfig(_t_final(cfg, nu), cfg.get("steps_per_period", 64),
                            leakage_tol=cfg.get("leakage_tol", _DEFAULT_LEAKAGE.get(cfg.model, 1e-3)))


def _predicted_nu(cfg, required=False):
    if cfg.model == "two_atom":
        return coeffs.two_atom_constants(cfg.get("omega1"), cfg.get("omega2"), cfg.get("omega_c"),
                                         None, cfg.get("g0"), cfg.get("g1"), cfg.get("g2"))["nu_star"]
    if cfg.model == "amplifier":
        if "epsilon_index" not in cfg:
            if required:
                raise ConfigurationError("model amplifier: the resonance prediction needs "
                                         "'epsilon_index'")
            return None
        return coeffs.amplifier_nu_star(cfg.get("omega_a"), cfg.get("omega_b"), cfg.get("g"),
                                        cfg.get("epsilon_index"))["nu_star"]
    return None


def _grid(cfg):
    lo, hi, step = cfg.get("nu_min"), cfg.get("nu_max"), cfg.get("nu_step")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    """RFC-4180 CSV with LF line endings and round-trip float precision.

    ``path`` may be ``None`` or ``"-"`` for standard output.
    """
    rows = [list(r) for r in rows]
    if any(len(r) != len(header) for r in rows):
        raise ParameterError("write_csv: rows must match the header length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _summary(cfg, result: dict, echo=None):
    parts = [cfg.command, cfg.model]
    params = dict(cfg.params)
    params.update(echo or {})
    parts += [f"{k}={_fmt(v)}" for k, v in params.items() if k != "output"]
    parts.append("RESULT")
    parts += [f"{k}={_fmt(v)}" for k, v in result.items()]
    print(" ".join(parts))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_coeffs(cfg):
    m, nu, kmax = cfg.model, cfg.get("nu"), cfg.get("kmax", 6)
    out = cfg.get("output")
    if m in ("rabi", "single", "parosc"):
        if m == "rabi":
            tab = coeffs.weak_recursion(1, cfg.get("omega0"), nu, 0.0, cfg.get("g"), kmax)
            scale = 1.0
        elif m == "single":
            tab = coeffs.weak_recursion(_kind(cfg).sign, cfg.get("omega0"), nu, cfg.get("g0"),
                                        cfg.get("g1"), kmax)
            scale = 1.0
        else:
            gamma, _ = _modulation(cfg, nu, cfg.get("omega0"))
            w, g0, g1 = models.parametric_oscillator_couplings(cfg.get("omega0"), gamma)
            tab = coeffs.weak_recursion(-1, w, nu, g0, g1, kmax)
            # coupling of E^(k+1) a^dag^2 = (g1/2) eps_k
            scale = 0.5
        rows = [(k, tab.h[k], tab.eps[k], scale * tab.g_eff(k)) for k in range(kmax + 1)]
        write_csv(out, ["k", "h_k", "eps_k", "g_eff_k"], rows)
        # resonance omega_X ~ (k+1) nu
        k_res = int(round(tab.omega / nu)) - 1
        result = {"eps_0": tab.eps[0]}
        if 0 <= k_res <= kmax:
            result.update(resonant_k=k_res, g_eff_resonant=scale * tab.g_eff(k_res))
        _summary(cfg, result, _echo(cfg, nu))
        return 0
    if m in ("amplifier", "two_atom"):
        if m == "amplifier":
            _, eps = _modulation(cfg, nu, cfg.get("omega_a"))
            c = coeffs.amplifier_constants(cfg.get("omega_a"), cfg.get("omega_b"), nu, cfg.get("g"),
                                           eps, kmax=kmax)
        else:
            c = coeffs.two_atom_constants(cfg.get("omega1"), cfg.get("omega2"), cfg.get("omega_c"), nu,
                                          cfg.get("g0"), cfg.get("g1"), cfg.get("g2"))
        scalars = {k: v for k, v in c.items() if np.ndim(v) == 0}
        write_csv(out, ["name", "value"], scalars.items())
        _summary(cfg, {"g_eff": c["g_eff"], "nu_star": c["nu_star"]}, _echo(cfg, nu))
        return 0
    omega = cfg.get("omega0")
    gamma, eps = _modulation(cfg, nu, omega)
    g = cfg.get("g")
    if m == "dicke":
        j = special.jv(np.arange(kmax + 1), eps)
        write_csv(out, ["k", "J_k", "g_J_k"], [(k, j[k], g * j[k]) for k in range(kmax + 1)])
        _summary(cfg, {"g_J0": g * j[0]}, {"gamma": gamma, "epsilon_index": eps})
        return 0
    rows = [(mm, coeffs.tilde_I_m(omega, nu, g, eps, mm)) for mm in range(1, kmax + 1)]
    write_csv(out, ["m", "tilde_I_m"], rows)
    _summary(cfg, {"I": coeffs.nonlinear_I(omega, nu, g, eps)}, {"gamma": gamma, "epsilon_index": eps})
    return 0


def _run_scan(cfg):
    build = _builder(cfg)
    grid = _grid(cfg)
    predicted = _predicted_nu(cfg)
    if predicted is not None and not grid[0] <= predicted <= grid[-1]:
        predicted = None
    centre = predicted if predicted is not None else grid[len(grid) // 2]
    spec = build(centre)
    probe = _probe(cfg, spec)
    if probe[1] is None:
        raise ConfigurationError(f"model {cfg.model}: a scan requires key 'final'")
    pcfg = _propagator_cfg(cfg, centre)
    res = scan_nu(build, grid, probe, pcfg, predicted_nu=predicted)
    echo = _echo(cfg, centre)
    if "t_final" not in cfg:
        echo["t_final"] = pcfg.t_final
    return res, pcfg, echo


def _cmd_scan(cfg):
    res, pcfg, echo = _run_scan(cfg)
    write_csv(cfg.get("output"), ["nu", "p_avg"], zip(res.nu_grid, res.p_avg))
    result = {"peak_nu": res.peak_nu, "peak_value": res.peak_value}
    if np.isfinite(res.predicted_nu):
        result.update(predicted_nu=res.predicted_nu, discrepancy=res.discrepancy)
    _summary(cfg, result, echo)
    return 0


def _cmd_evolve(cfg):
    build = _builder(cfg)
    nu = cfg.get("nu")
    spec = build(nu)
    echo = _echo(cfg, nu)
    init, fin = _probe(cfg, spec)
    if fin is not None and "final" in cfg:
        obs = np.zeros((spec.dim, spec.dim))
        obs[fin, fin] = 1.0
        obs_name = f"P({cfg.get('final')})"
    elif spec.label == "two_atom":
        obs = np.zeros((spec.dim, spec.dim))
        obs[fin, fin] = 1.0
        obs_name = "P(ee0)"
    else:
        obs, obs_name = _default_observable(spec)
    psi0 = np.zeros(spec.dim, dtype=complex)
    psi0[init] = 1.0
    pcfg = _propagator_cfg(cfg, nu)
    traj = expectation_trajectory(spec, pcfg, psi0, obs)
    write_csv(cfg.get("output"), ["t", "value"], zip(traj.times, traj.values))
    if "t_final" not in cfg:
        echo["t_final"] = pcfg.t_final
    _summary(cfg, {"observable": obs_name, "samples": traj.times.size, "final_value": traj.values[-1],
                   "max_value": float(np.max(traj.values))}, echo)
    return 0


def _cmd_compare(cfg):
    tol = cfg.get("tolerance")
    if "nu_min" in cfg:
        predicted = _predicted_nu(cfg, required=True)
        if predicted is None:
            raise ConfigurationError(f"model {cfg.model}: no resonance prediction for a scan comparison")
        res, pcfg, echo = _run_scan(cfg)
        rep = compare(res, predicted, tol)
        quantity = "peak_nu"
        if cfg.get("output"):
            write_csv(cfg.get("output"), ["nu", "p_avg"], zip(res.nu_grid, res.p_avg))
    else:
        build = _builder(cfg)
        nu = cfg.get("nu")
        spec = build(nu)
        echo = _echo(cfg, nu)
        init, fin = _probe(cfg, spec)
        if fin is None:
            fin = init
        obs = np.zeros((spec.dim, spec.dim))
        obs[fin, fin] = 1.0
        psi0 = np.zeros(spec.dim, dtype=complex)
        psi0[init] = 1.0
        pcfg = _propagator_cfg(cfg, nu)
        traj = expectation_trajectory(spec, pcfg, psi0, obs)
        fit = extract_rabi(traj)
        predicted, _ = _predicted_rabi(cfg, nu)
        rep = compare(fit, predicted, tol, relative=True)
        quantity = "omega_rabi"
        if cfg.get("output"):
            write_csv(cfg.get("output"), ["t", "value"], zip(traj.times, traj.values))
    result = {"quantity": quantity}
    result.update(rep.as_dict())
    _summary(cfg, result, echo)
    return 0 if rep.passed else 4


def _cmd_tables(cfg):
    """Weak-recursion constants next to the Rabi and parametric-oscillator closed forms."""
    omega = cfg.get("omega0")
    rows = []
    if cfg.model == "rabi":
        g = cfg.get("g")
        e = g / omega
        closed = [g, -9.0 / 4.0 * g * e ** 2, (2.5 ** 5 / 9.0) * g * e ** 4]
        names = ["E S+", "E^3 S+", "E^5 S+"]
        for k in range(3):
            nu = omega / (2 * k + 1)
            tab = coeffs.weak_recursion(1, omega, nu, 0.0, g, 2 * k)
            rows.append((k, names[k], nu, tab.g_eff(2 * k), closed[k]))
    else:
        if ("gamma" in cfg) == ("epsilon_index" in cfg):
            raise ConfigurationError("model parosc: give exactly one of 'gamma' and 'epsilon_index'")
        gamma = cfg.get("gamma") if "gamma" in cfg else 2.0 * cfg.get("epsilon_index")
        g = omega * gamma / 2.0
        e = g / omega
        closed = [g / 2.0, -g * e, 81.0 / 32.0 * g * e ** 2]
        names = ["E a+^2", "E^2 a+^2", "E^3 a+^2"]
        w, g0, g1 = models.parametric_oscillator_couplings(omega, gamma)
        for k in range(3):
            nu = 2.0 * omega / (k + 1)
            tab = coeffs.weak_recursion(-1, w, nu, g0, g1, k)
            rows.append((k, names[k], nu, 0.5 * tab.g_eff(k), closed[k]))
    rows = [r + (r[3] / r[4],) for r in rows]
    write_csv(cfg.get("output"), ["row", "interaction", "nu", "g_eff_recursion", "g_eff_closed_form",
                                  "ratio"], rows)
    _summary(cfg, {f"ratio_{r[0]}": r[5] for r in rows})
    return 0


_COMMANDS = {"coeffs": _cmd_coeffs, "scan": _cmd_scan, "evolve": _cmd_evolve,
             "compare": _cmd_compare, "tables": _cmd_tables}


def run(argv=None) -> int:
    """Execute one command; returns the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, dump = parse_config(argv)
        validate(cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigurationError, ParameterError) as exc:
        print(f"floqlie: configuration error: {exc}", file=sys.stderr)
        return 2
    if dump:
        sys.stdout.write(format_config(cfg))
        return 0
    try:
        return _COMMANDS[cfg.command](cfg)
    except (ConfigurationError, ParameterError) as exc:
        print(f"floqlie {cfg.command}: configuration error: {exc}", file=sys.stderr)
        return 2
    except (FloqlieError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"floqlie {cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"floqlie {cfg.command}: cannot write output: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
