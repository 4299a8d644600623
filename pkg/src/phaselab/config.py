"""Declarative experiment configuration: strict parsing, validation, and
round-trippable serialization."""

import copy
import json
from dataclasses import dataclass, field

from .decoherence import DecoherenceConfig, MeasurementSpec
from .errors import ValidationError
from .grid import make_grid
from .potential import Kick, Potential
from .quantum import MoyalConfig
from .state import PhysicalParams, check_resolvability, init_gaussian

ENGINES = ("classical", "quantum", "quantum+decoherence", "classical+decoherence")

SCALAR_DIAGNOSTICS = ("norm", "purity", "negativity_volume")
DERIV_PREFIX = "derivative_norm_p"
L2_PREFIX = "l2_"
L2_SEP = "_vs_"

SWEEP_ALIASES = {
    "hbar": ("system", "hbar"),
    "mass": ("system", "mass"),
    "diffusion_D": ("decoherence", "diffusion_D"),
    "kick_strength": ("system", "kick", "strength"),
    "dt": ("evolution", "dt"),
    "truncation_order": ("moyal", "truncation_order"),
}

_TOP_KEYS = {"system", "grid", "initial_state", "engines", "evolution",
             "decoherence", "moyal", "diagnostics", "break_threshold",
             "sweep", "lyapunov", "ensemble", "output", "seed"}
_REQUIRED = ("system", "grid", "initial_state", "engines", "evolution",
             "diagnostics", "output")


def _check_keys(obj, allowed, where):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ValidationError(
            f"unknown key(s) {sorted(unknown)} in {where}; allowed: {sorted(allowed)}")


def _require(obj, keys, where):
    for k in keys:
        if k not in obj:
            raise ValidationError(f"missing required key '{k}' in {where}")


def _number(obj, key, where, default=None, minimum=None, strict_min=False):
    if key not in obj:
        if default is None:
            raise ValidationError(f"missing required key '{key}' in {where}")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}.{key} must be a number, got {v!r}")
    v = float(v)
    if minimum is not None:
        if strict_min and not v > minimum:
            raise ValidationError(f"{where}.{key} must be > {minimum}, got {v}")
        if not strict_min and not v >= minimum:
            raise ValidationError(f"{where}.{key} must be >= {minimum}, got {v}")
    return v


@dataclass
class ExperimentConfig:
    """Fully resolved description of one experiment.

    Construction goes through ``from_dict`` (strict: unknown keys are
    errors); ``to_dict`` emits the fully resolved form with all defaults
    expanded, and parse(serialize(x)) == x.
    """

    raw: dict = field(repr=False)

    def __init__(self, raw):
        self.raw = raw

    # -- parsed accessors ---------------------------------------------------

    def grid(self):
        g = self.raw["grid"]
        return make_grid(g["x_min"], g["x_max"], g["n_x"],
                         g["p_min"], g["p_max"], g["n_p"])

    def potential(self):
        s = self.raw["system"]
        kick = None
        if s.get("kick") is not None:
            k = s["kick"]
            kick = Kick(k["strength"], k["period"],
                        "cos" if k["shape"] == "cos" else tuple(k["shape"]))
        return Potential(tuple(s["potential"]), kick=kick)

    def params(self):
        s = self.raw["system"]
        return PhysicalParams(hbar=s["hbar"], mass=s["mass"])

    def initial_state(self, grid):
        i = self.raw["initial_state"]
        return init_gaussian(grid, i["x0"], i["p0"], i["sigma_x"], i["sigma_p"])

    def moyal_config(self):
        m = self.raw["moyal"]
        return MoyalConfig(truncation_order=m["truncation_order"], dealias=m["dealias"])

    def decoherence_config(self):
        d = self.raw.get("decoherence")
        if d is None:
            return DecoherenceConfig()
        meas = None
        if d.get("measurement") is not None:
            m = d["measurement"]
            meas = MeasurementSpec(period=m["period"], sigma_x=m.get("sigma_x"),
                                   sigma_p=m.get("sigma_p"))
        return DecoherenceConfig(diffusion_D=d["diffusion_D"], measurement=meas,
                                 diffusion_D_x=d.get("diffusion_D_x", 0.0))

    @property
    def engines(self):
        return tuple(self.raw["engines"])

    @property
    def diagnostics(self):
        return tuple(self.raw["diagnostics"])

    @property
    def dt(self):
        return self.raw["evolution"]["dt"]

    @property
    def t_final(self):
        return self.raw["evolution"]["t_final"]

    @property
    def snapshot_stride(self):
        return self.raw["evolution"]["snapshot_stride"]

    @property
    def seed(self):
        return self.raw["seed"]

    @property
    def break_threshold(self):
        return self.raw.get("break_threshold")

    @property
    def sweep(self):
        return self.raw.get("sweep")

    @property
    def output_directory(self):
        return self.raw["output"]["directory"]

    def to_dict(self):
        return copy.deepcopy(self.raw)

    def with_sweep_value(self, value):
        """Copy of this config with the swept parameter set and sweep removed."""
        raw = copy.deepcopy(self.raw)
        path = SWEEP_ALIASES[raw["sweep"]["parameter"]]
        node = raw
        for key in path[:-1]:
            if node.get(key) is None:
                raise ValidationError(
                    f"sweep parameter path {'.'.join(path)} missing section '{key}'")
            node = node[key]
        node[path[-1]] = value
        raw.pop("sweep")
        return parse_config(raw)


def _parse_l2_token(token, engines):
    body = token[len(L2_PREFIX):]
    if L2_SEP not in body:
        raise ValidationError(
            f"bad l2 diagnostic '{token}': expected l2_<engine>{L2_SEP}<engine>")
    a, b = body.split(L2_SEP, 1)
    for e in (a, b):
        if e not in ENGINES:
            raise ValidationError(f"l2 diagnostic '{token}' names unknown engine '{e}'")
        if e not in engines:
            raise ValidationError(
                f"l2 diagnostic '{token}' references engine '{e}' not in the run")
    if a == b:
        raise ValidationError(f"l2 diagnostic '{token}' compares an engine to itself")
    return a, b


def parse_config(data):
    """Validate a config dict (or JSON string) into an ExperimentConfig.

    Strict: unknown keys anywhere are validation errors, every component
    invariant is checked before any compute, and defaults are expanded into
    the resolved form.
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ValidationError(f"config is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValidationError("config root must be a JSON object")
    _check_keys(data, _TOP_KEYS, "config")
    _require(data, _REQUIRED, "config")
    raw = {}

    # system
    s = data["system"]
    _check_keys(s, {"potential", "kick", "mass", "hbar"}, "system")
    _require(s, ("potential",), "system")
    if not isinstance(s["potential"], list) or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in s["potential"]):
        raise ValidationError("system.potential must be a list of numbers")
    kick = None
    if s.get("kick") is not None:
        k = s["kick"]
        _check_keys(k, {"strength", "period", "shape"}, "system.kick")
        _require(k, ("strength", "period", "shape"), "system.kick")
        shape = k["shape"]
        if shape != "cos":
            if not isinstance(shape, list):
                raise ValidationError("system.kick.shape must be 'cos' or a coefficient list")
            shape = [float(c) for c in shape]
        kick = {"strength": _number(k, "strength", "system.kick"),
                "period": _number(k, "period", "system.kick", minimum=0.0, strict_min=True),
                "shape": shape}
    raw["system"] = {
        "potential": [float(c) for c in s["potential"]],
        "kick": kick,
        "mass": _number(s, "mass", "system", default=1.0, minimum=0.0, strict_min=True),
        "hbar": _number(s, "hbar", "system", default=1.0, minimum=0.0, strict_min=True),
    }

    # grid
    g = data["grid"]
    _check_keys(g, {"x_min", "x_max", "n_x", "p_min", "p_max", "n_p"}, "grid")
    _require(g, ("x_min", "x_max", "n_x", "p_min", "p_max", "n_p"), "grid")
    raw["grid"] = {
        "x_min": _number(g, "x_min", "grid"), "x_max": _number(g, "x_max", "grid"),
        "n_x": int(g["n_x"]),
        "p_min": _number(g, "p_min", "grid"), "p_max": _number(g, "p_max", "grid"),
        "n_p": int(g["n_p"]),
    }

    # initial state
    i = data["initial_state"]
    _check_keys(i, {"x0", "p0", "sigma_x", "sigma_p"}, "initial_state")
    _require(i, ("x0", "p0", "sigma_x", "sigma_p"), "initial_state")
    raw["initial_state"] = {
        "x0": _number(i, "x0", "initial_state"), "p0": _number(i, "p0", "initial_state"),
        "sigma_x": _number(i, "sigma_x", "initial_state", minimum=0.0, strict_min=True),
        "sigma_p": _number(i, "sigma_p", "initial_state", minimum=0.0, strict_min=True),
    }

    # engines
    engines = data["engines"]
    if not isinstance(engines, list) or not engines:
        raise ValidationError("engines must be a non-empty list")
    for e in engines:
        if e not in ENGINES:
            raise ValidationError(f"unknown engine '{e}'; allowed: {list(ENGINES)}")
    if len(set(engines)) != len(engines):
        raise ValidationError("engines list contains duplicates")
    raw["engines"] = list(engines)

    # evolution
    ev = data["evolution"]
    _check_keys(ev, {"dt", "t_final", "snapshot_stride"}, "evolution")
    dt = _number(ev, "dt", "evolution", minimum=0.0, strict_min=True)
    t_final = _number(ev, "t_final", "evolution", minimum=0.0, strict_min=True)
    stride = ev.get("snapshot_stride", 1)
    if isinstance(stride, bool) or int(stride) != stride or stride < 1:
        raise ValidationError(f"evolution.snapshot_stride must be a positive integer, got {stride}")
    stride = int(stride)
    n_steps = round(t_final / dt)
    if n_steps < 1 or abs(t_final - n_steps * dt) > 1e-9 * max(1.0, t_final):
        raise ValidationError(
            f"t_final = {t_final} must be an integer number of dt = {dt} steps")
    if dt * stride > t_final + 1e-12:
        raise ValidationError("dt * snapshot_stride must not exceed t_final")
    raw["evolution"] = {"dt": dt, "t_final": t_final, "snapshot_stride": stride}

    # decoherence
    if data.get("decoherence") is not None:
        d = data["decoherence"]
        _check_keys(d, {"diffusion_D", "diffusion_D_x", "measurement"}, "decoherence")
        meas = None
        if d.get("measurement") is not None:
            m = d["measurement"]
            _check_keys(m, {"period", "sigma_x", "sigma_p"}, "decoherence.measurement")
            meas = {"period": _number(m, "period", "measurement", minimum=0.0, strict_min=True),
                    "sigma_x": None if m.get("sigma_x") is None
                    else _number(m, "sigma_x", "measurement", minimum=0.0, strict_min=True),
                    "sigma_p": None if m.get("sigma_p") is None
                    else _number(m, "sigma_p", "measurement", minimum=0.0, strict_min=True)}
        raw["decoherence"] = {
            "diffusion_D": _number(d, "diffusion_D", "decoherence", default=0.0, minimum=0.0),
            "diffusion_D_x": _number(d, "diffusion_D_x", "decoherence", default=0.0, minimum=0.0),
            "measurement": meas,
        }
    else:
        raw["decoherence"] = None

    # moyal
    m = data.get("moyal", {})
    _check_keys(m, {"truncation_order", "dealias"}, "moyal")
    trunc = m.get("truncation_order", "exact")
    if trunc != "exact" and (isinstance(trunc, bool) or int(trunc) != trunc or trunc < 0):
        raise ValidationError(
            f"moyal.truncation_order must be 'exact' or a non-negative integer, got {trunc!r}")
    raw["moyal"] = {"truncation_order": trunc if trunc == "exact" else int(trunc),
                    "dealias": bool(m.get("dealias", False))}

    # diagnostics
    diags = data["diagnostics"]
    if not isinstance(diags, list) or not diags:
        raise ValidationError("diagnostics must be a non-empty list")
    for tok in diags:
        if tok in SCALAR_DIAGNOSTICS:
            continue
        if tok.startswith(DERIV_PREFIX):
            try:
                order = int(tok[len(DERIV_PREFIX):])
            except ValueError:
                order = -1
            if not 1 <= order <= 8:
                raise ValidationError(f"bad derivative diagnostic '{tok}'")
            continue
        if tok.startswith(L2_PREFIX):
            _parse_l2_token(tok, engines)
            continue
        raise ValidationError(f"unknown diagnostic '{tok}'")
    if len(set(diags)) != len(diags):
        raise ValidationError("diagnostics list contains duplicates")
    raw["diagnostics"] = list(diags)

    # break threshold
    if "break_threshold" in data and data["break_threshold"] is not None:
        raw["break_threshold"] = _number(data, "break_threshold", "config",
                                         minimum=0.0, strict_min=True)
    else:
        raw["break_threshold"] = None

    # sweep
    if data.get("sweep") is not None:
        sw = data["sweep"]
        _check_keys(sw, {"parameter", "values"}, "sweep")
        _require(sw, ("parameter", "values"), "sweep")
        if sw["parameter"] not in SWEEP_ALIASES:
            raise ValidationError(
                f"unknown sweep parameter '{sw['parameter']}'; "
                f"allowed: {sorted(SWEEP_ALIASES)}")
        if not isinstance(sw["values"], list) or not sw["values"]:
            raise ValidationError("sweep.values must be a non-empty list")
        raw["sweep"] = {"parameter": sw["parameter"], "values": list(sw["values"])}
    else:
        raw["sweep"] = None

    # lyapunov block
    if data.get("lyapunov") is not None:
        ly = data["lyapunov"]
        _check_keys(ly, {"x0", "p0", "dt", "n_steps", "renorm_every"}, "lyapunov")
        _require(ly, ("x0", "p0", "dt", "n_steps"), "lyapunov")
        n_ly = int(ly["n_steps"])
        renorm = int(ly.get("renorm_every", 10))
        if n_ly < 10 * renorm:
            raise ValidationError("lyapunov.n_steps must be at least 10*renorm_every")
        raw["lyapunov"] = {"x0": _number(ly, "x0", "lyapunov"),
                           "p0": _number(ly, "p0", "lyapunov"),
                           "dt": _number(ly, "dt", "lyapunov", minimum=0.0, strict_min=True),
                           "n_steps": n_ly, "renorm_every": renorm}
    else:
        raw["lyapunov"] = None

    # ensemble block (standard-map diffusion; requires a cosine kick)
    if data.get("ensemble") is not None:
        en = data["ensemble"]
        _check_keys(en, {"n_particles", "n_steps", "p0"}, "ensemble")
        _require(en, ("n_particles", "n_steps"), "ensemble")
        if raw["system"]["kick"] is None or raw["system"]["kick"]["shape"] != "cos":
            raise ValidationError("ensemble block requires a cosine kick (standard map)")
        raw["ensemble"] = {"n_particles": int(en["n_particles"]),
                           "n_steps": int(en["n_steps"]),
                           "p0": _number(en, "p0", "ensemble", default=0.0)}
    else:
        raw["ensemble"] = None

    # output & seed
    out = data["output"]
    _check_keys(out, {"directory"}, "output")
    _require(out, ("directory",), "output")
    if not isinstance(out["directory"], str) or not out["directory"]:
        raise ValidationError("output.directory must be a non-empty string")
    raw["output"] = {"directory": out["directory"]}
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or int(seed) != seed:
        raise ValidationError(f"seed must be an integer, got {seed!r}")
    raw["seed"] = int(seed)

    cfg = ExperimentConfig(raw)
    _validate_physics(cfg)
    return cfg


def _validate_physics(cfg):
    """Cross-component invariants, checked before any compute."""
    grid = cfg.grid()
    pot = cfg.potential()
    params = cfg.params()
    cfg.initial_state(grid)  # width preconditions
    cfg.moyal_config()
    dcfg = cfg.decoherence_config()

    quantum_engines = [e for e in cfg.engines if e.startswith("quantum")]
    if quantum_engines:
        check_resolvability(grid, params)
    if any(e.endswith("decoherence") for e in cfg.engines) and cfg.raw["decoherence"] is None:
        raise ValidationError("decoherence engines configured but no decoherence section")
    if dcfg.measurement is not None:
        if dcfg.measurement.sigma_x is not None and dcfg.measurement.sigma_x < grid.dx:
            raise ValidationError("measurement sigma_x is below the grid spacing dx")
        if dcfg.measurement.sigma_p is not None and dcfg.measurement.sigma_p < grid.dp:
            raise ValidationError("measurement sigma_p is below the grid spacing dp")

    dt = cfg.dt
    p_abs_max = max(abs(grid.p_min), abs(grid.p_max - grid.dp))
    import numpy as np
    v1_max = float(np.max(np.abs(pot.derivative(grid.x, 1))))
    if p_abs_max * dt / grid.dx >= 1.0 or v1_max * dt / grid.dp >= 1.0:
        raise ValidationError(
            "CFL advection guard violated for the configured grid and dt")
    if pot.kick is not None:
        ratio = pot.kick.period / dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValidationError("kick period must be an integer multiple of dt")
    if dcfg.measurement is not None:
        ratio = dcfg.measurement.period / dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValidationError("measurement period must be an integer multiple of dt")


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg):
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=False)
