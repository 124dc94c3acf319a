"""Experiment specs, config files and dispatch to the experiment functions."""

import time
from dataclasses import dataclass, field

from . import analytic, bulk, stationary, tasep
from .errors import ParameterError
from .geometry import DownRightPath, Rect, axes_path
from .lpp import axis_exits, last_passage_table
from .noise import generate_noise
from .report import McReport, Table, spec_hash
from .weights import build_weights, recipe_from_config


def floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


def ints(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(float(v)) for v in str(text).replace(" ", "").split(",") if v]


def sizes(text):
    """'100x100,400x400' -> [(100, 100), (400, 400)]."""
    if isinstance(text, (list, tuple)):
        return [tuple(int(a) for a in v) for v in text]
    out = []
    for part in str(text).replace(" ", "").split(","):
        a, _, b = part.partition("x")
        out.append((int(a), int(b or a)))
    return out


def _int(v):
    f = float(v)
    if f != int(f):
        raise ParameterError(f"expected an integer, got {v!r}")
    return int(f)


CONVERT = {
    "seed": _int, "reps": _int, "threads": _int, "replica": _int,
    "w": float, "z": float, "m": _int, "n": _int, "p": _int, "q": _int, "k": _int,
    "path": str, "kind": str, "side": str, "mode": str, "r2_min": float,
    "s_grid": floats, "s": floats, "t": floats, "xs": floats, "ns": ints, "sizes": sizes,
    "max_side": _int, "eps": float, "tol": float, "pilot_reps": _int, "alpha": float,
}

DEFAULTS = {
    "shape": dict(m=1, n=1),
    "simulate": dict(kind="two-param", w=0.5, z=0.5, m=10, n=10, replica=0),
    "verify.burke": dict(z=0.5, path="3,8:RDRDRDRDRD@1", reps=100000),
    "verify.rains": dict(w=0.55, z=0.45, m=5, n=5, reps=1000000),
    "verify.variance": dict(z=0.5, m=20, n=30, reps=100000),
    "verify.stationarity": dict(z=0.5, m=20, n=20, reps=20000),
    "verify.exit-identity": dict(z=0.5, p=3, q=2, m=20, n=20, reps=100000),
    "verify.lemmas": dict(reps=1000, max_side=8),
    "verify.tasep": dict(w=0.5, z=0.5, m=30, n=30),
    "exit-tail": dict(kind="two-param", m=200, n=200, s_grid=[0.5 + 0.25 * k for k in range(9)],
                      side="+", reps=100000, r2_min=0.95),
    "first-step": dict(m=400, n=400, s=[1.5, 2.0, 2.5], reps=100000, tol=0.35),
    "fluctuation": dict(mode="midpoint", ns=[250, 500, 1000, 2000], reps=4000, m=40, n=40,
                        s_grid=[0.25, 0.5, 0.75, 1.0]),
    "busemann": dict(mode="ladder", path="16,2:DR@1", sizes=[(100, 100), (1600, 1600)],
                     s=[-2.0], t=[1.0], eps=bulk.BUSEMANN_EPS, reps=10000, n=800),
    "cif": dict(ns=[250, 500, 1000, 2000, 4000], reps=10000),
    "cif-stationary": dict(mode="limit", w=0.5, z=0.5, n=500, reps=2000,
                           xs=[analytic.x_for_direction(0.7), analytic.x_for_direction(0.3)]),
}
VERIFY = ("burke", "rains", "variance", "stationarity", "exit-identity", "lemmas", "tasep")
GLOBAL = dict(seed=0, threads=None)


def read_config(path):
    """Flat 'key = value' lines; '#' starts a comment."""
    out = {}
    try:
        text = open(path).read()
    except OSError as e:
        raise ParameterError(f"cannot read config {path}: {e}") from e
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise ParameterError(f"{path}:{no}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def convert(params):
    out = {}
    for k, v in params.items():
        if v is None:
            out[k] = None
            continue
        conv = CONVERT.get(k)
        if conv is None:
            raise ParameterError(f"unknown parameter {k!r}")
        try:
            out[k] = conv(v)
        except (TypeError, ValueError) as e:
            raise ParameterError(f"bad value for {k}: {v!r}") from e
    return out


@dataclass
class ExperimentSpec:
    name: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = None
    out: str = None
    format: str = "json"

    @classmethod
    def build(cls, name, given=None, config=None, out=None, fmt="json"):
        if name not in DEFAULTS:
            raise ParameterError(f"unknown experiment {name!r}")
        merged = {**GLOBAL, **DEFAULTS[name], **convert(config or {}), **convert(given or {})}
        seed = merged.pop("seed")
        threads = merged.pop("threads")
        return cls(name, merged, seed, threads, out, fmt)

    def describe(self):
        """Everything that determines the results (not threads or outputs)."""
        p = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()}
        return {"experiment": self.name, "seed": self.seed, "params": p}

    def hash(self):
        return spec_hash(self.describe())


def _reps(P):
    r = P.get("reps")
    if r is None or r < 1:
        raise ParameterError(f"reps must be >= 1, got {r}")
    return r


def _path(P, default=None):
    text = P.get("path")
    if text:
        return DownRightPath.parse(text)
    return default


def _default_rate(P, m, n):
    z = P.get("z")
    return analytic.char_direction(m, n) if z is None else z


def _shape(P, kw):
    q = analytic.shape_quantities(P["m"], P["n"])
    rep = McReport("shape", 0, report_only=True)
    rep.estimates.update(gamma=q.gamma, zeta=q.zeta, sigma=q.sigma)
    return rep


def _simulate(P, kw, seed):
    m, n = P["m"], P["n"]
    recipe = recipe_from_config({k: P[k] for k in ("kind", "w", "z", "k", "path") if P.get(k) is not None}
                                | {"m": m, "n": n})
    hi = (m + 1, n + 1) if recipe.kind == "northeast" else (m, n)
    noise = generate_noise(seed, P["replica"], Rect(0, 0, *hi))
    wf = build_weights(noise, recipe)
    table = last_passage_table(wf)
    rep = McReport("simulate", 1, report_only=True)
    rep.estimates["G"] = table((m, n))
    if recipe.kind == "two-param" and (m, n) != (0, 0):
        zh, zv = axis_exits(wf, m, n)
        rep.estimates.update(Zhor=zh, Zver=zv)
    rep.tables["lpp"] = Table(["i", "j", "G"], [[i, j, float(table.G[i, j])]
                                                 for i in range(m + 1) for j in range(n + 1)])
    return rep


def _verify(sub, P, kw, seed):
    if sub == "burke":
        return stationary.verify_burke(_path(P), P["z"], _reps(P), seed, **kw)
    if sub == "rains":
        return stationary.verify_rains(P["w"], P["z"], P["m"], P["n"], _reps(P), seed, **kw)
    if sub == "variance":
        return stationary.verify_variance(P["z"], P["m"], P["n"], _reps(P), seed, **kw)
    if sub == "stationarity":
        return stationary.verify_stationarity(P["z"], P["m"], P["n"], _reps(P), seed=seed, **kw)
    if sub == "exit-identity":
        return stationary.verify_exit_identity(P["z"], P["p"], P["q"], P["m"], P["n"], _reps(P),
                                               seed, **kw)
    if sub == "lemmas":
        return stationary.check_deterministic_lemmas(_reps(P), seed, P["max_side"])
    if sub == "tasep":
        return tasep.second_class_vs_cif(P["w"], P["z"], P["n"], seed, m=P["m"])
    raise ParameterError(f"unknown verify target {sub!r}")


def _exit_tail(P, kw, seed):
    m, n = P["m"], P["n"]
    z = _default_rate(P, m, n)
    w = P.get("w")
    kind = P["kind"]
    w = z if w is None and kind == "two-param" else w
    nu = _path(P, axes_path(m, n))
    curve = stationary.exit_tail((kind, w, z), nu, m, n, P["s_grid"], _reps(P), seed,
                                 P["side"], **kw)
    rep = stationary.tail_report(curve, "exit-tail", seed, m=m, n=n, w=w, z=z, path=str(nu))
    return stationary.assess_tail(rep, curve, P["r2_min"])


def _first_step(P, kw, seed):
    m, n = P["m"], P["n"]
    c, sig = analytic.char_direction(m, n), analytic.scale(m, n)
    zs = [c + s / sig for s in P["s"]] if P.get("z") is None else [P["z"]]
    rep = stationary.first_step_prob(zs, m, n, _reps(P), seed, **kw)
    rep.report_only = False
    stationary.refined_rate_check(rep, P["tol"])
    if not rep.checks:
        rep.report_only = True
    return rep


def _fluctuation(P, kw, seed):
    mode = P["mode"]
    if mode == "midpoint":
        return bulk.midpoint_exponent(P["ns"], _reps(P), seed, **kw)
    if mode == "tail":
        m, n = P["m"], P["n"]
        nu = _path(P, axes_path(m, n))
        curve = bulk.transversal_fluct(nu, m, n, P["s_grid"], _reps(P), seed, P.get("side", "+"), **kw)
        rep = stationary.tail_report(curve, "fluctuation", seed, m=m, n=n, path=str(nu))
        rep.estimates["colinearity"] = curve.extra["colinearity"]
        rep.report_only = True
        return rep
    if mode == "identity":
        return bulk.verify_bulk_boundary(P["m"], P["n"], _reps(P), seed, **kw)
    raise ParameterError(f"fluctuation mode must be midpoint, tail or identity, got {mode!r}")


def _busemann(P, kw, seed):
    if P["mode"] == "marginal":
        return bulk.busemann_marginal(P["n"], _reps(P), seed, **kw)
    if P["mode"] != "ladder":
        raise ParameterError(f"busemann mode must be ladder or marginal, got {P['mode']!r}")
    return bulk.busemann_experiment(_path(P), P["sizes"], P["s"], P["t"], _reps(P), seed,
                                    P["eps"], **kw)


def _cif(P, kw, seed):
    return bulk.cif_experiment(P["ns"], P.get("xs"), _reps(P), seed,
                               pilot_reps=P.get("pilot_reps"), **kw)


def _cif_stationary(P, kw, seed):
    if P["mode"] == "equivalence":
        return bulk.check_stationary_equivalences(P["w"], P["z"], P["n"], _reps(P), seed, **kw)
    return bulk.stationary_cif(P["w"], P["z"], P["n"], _reps(P), P["xs"], seed, P.get("tol"), **kw)


def run(spec):
    """Dispatch a spec; returns the McReport with seed and spec hash embedded."""
    t0 = time.time()
    P = dict(spec.params)
    kw = {"threads": spec.threads} if spec.threads else {}
    name, _, sub = spec.name.partition(".")
    seed = spec.seed
    if name == "shape":
        rep = _shape(P, kw)
    elif name == "simulate":
        rep = _simulate(P, kw, seed)
    elif name == "verify":
        rep = _verify(sub, P, kw, seed)
    elif name == "exit-tail":
        rep = _exit_tail(P, kw, seed)
    elif name == "first-step":
        rep = _first_step(P, kw, seed)
    elif name == "fluctuation":
        rep = _fluctuation(P, kw, seed)
    elif name == "busemann":
        rep = _busemann(P, kw, seed)
    elif name == "cif":
        rep = _cif(P, kw, seed)
    elif name == "cif-stationary":
        rep = _cif_stationary(P, kw, seed)
    else:
        raise ParameterError(f"unknown experiment {spec.name!r}")
    rep.metadata.update(seed=seed, spec_hash=spec.hash(), experiment_spec=spec.describe())
    rep.metadata.setdefault("wall_time", time.time() - t0)
    return rep
