"""Batch execution of verification checks from a JSON configuration.

A run expands the configured checks into independent scenario tasks, executes
them (optionally across processes), and writes one CSV per check plus a JSON
summary.  Per-scenario seeds are derived by hashing the master seed with the
scenario id, so adding scenarios never perturbs existing results and the
output is byte-identical across parallelism degrees.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import densities, divergences, rules, theorems
from .densities import ParamDensity
from .errors import ConfigError, SdklError
from .quadrature import QuadSpec

CHECK_IDS = ("theorem1", "theorem3", "theorem2", "alpha_bounds", "qsd",
             "lemma1", "figure1", "impropriety")

CSV_COLUMNS = ("scenario_id", "check_id", "predicted_sign",
               "stabilized_sign", "boundary", "agrees", "last_delta",
               "err_estimate", "status")

_DENSITY_KEYS = {"sigma", "nu", "weights", "means", "sds"}


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    checks: List[dict]
    quad: dict = field(default_factory=dict)
    out_dir: str = "out"
    seed: int = 0
    jobs: int = 1

    @staticmethod
    def from_dict(raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("top-level config must be an object")
        checks = raw.get("checks", [])
        if not isinstance(checks, list):
            raise ConfigError("'checks' must be a list")
        for c in checks:
            if not isinstance(c, dict) or "check" not in c:
                raise ConfigError("each check entry needs a 'check' field")
            if c["check"] not in CHECK_IDS:
                raise ConfigError(f"unknown check id {c['check']!r}")
        cfg = RunConfig(checks=checks,
                        quad=raw.get("quad", {}),
                        out_dir=raw.get("out_dir", "out"),
                        seed=int(raw.get("seed", 0)),
                        jobs=int(raw.get("jobs", 1)))
        if cfg.jobs < 1:
            raise ConfigError("'jobs' must be at least 1")
        return cfg

    @staticmethod
    def from_path(path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config parse error at line {exc.lineno}, column "
                f"{exc.colno}: {exc.msg}") from exc
        return RunConfig.from_dict(raw)


def _density_from_dict(d: dict) -> ParamDensity:
    if not isinstance(d, dict) or "family" not in d:
        raise ConfigError("density spec needs a 'family' field")
    shape = {k: v for k, v in d.items() if k in _DENSITY_KEYS}
    try:
        return densities.make_density(d["family"], **shape)
    except SdklError as exc:
        raise ConfigError(str(exc)) from exc


def _rule_from_dict(d: dict, model: ParamDensity) -> rules.UpdateRule:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("rule spec needs a 'kind' field")
    kind = d["kind"]
    try:
        if kind in (rules.SD, rules.SCALED_SD):
            return rules.score_driven(model, alpha=float(d["alpha"]),
                                      scale=float(d.get("scale", 1.0)))
        if kind == rules.ANTI:
            return rules.anti_score(model, alpha=float(d["alpha"]))
        if kind == rules.QSD:
            return rules.quasi_score_driven(
                model, alpha=float(d["alpha"]),
                tilde=_density_from_dict(d["tilde"]))
        if kind == rules.DOWNSCALED:
            return rules.downscaled(_rule_from_dict(d["base"], model),
                                    kappa=float(d["kappa"]))
        if kind == rules.LAZY:
            return rules.lazy(_rule_from_dict(d["base"], model),
                              freeze_prob=float(d["freeze_prob"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad rule spec for kind {kind!r}: {exc}") from exc
    raise ConfigError(f"unknown rule kind {kind!r}")


def _scenario_from_dict(d: dict, quad: QuadSpec) -> theorems.Scenario:
    truth = _density_from_dict(d["truth"])
    model = _density_from_dict(d["model"])
    truth_next = (_density_from_dict(d["truth_next"])
                  if d.get("truth_next") else None)
    return theorems.Scenario(
        scenario_id=str(d["id"]), truth=truth, lam=float(d["lam"]),
        model=model, theta_pred=float(d["theta_pred"]),
        rule=_rule_from_dict(d["rule"], model),
        y_t=None if d.get("y_t") is None else float(d["y_t"]),
        scale0=float(d.get("scale0", 0.1)),
        halvings=int(d.get("halvings", 10)),
        quad=quad, forward=bool(d.get("forward", False)),
        truth_next=truth_next, lam_next=float(d.get("lam_next", 0.0)))


def seed_for(master_seed: int, scenario_id: str) -> int:
    digest = hashlib.sha256(
        f"{master_seed}:{scenario_id}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def _quad_for(quad_cfg: dict, seed: int) -> QuadSpec:
    try:
        return QuadSpec(seed=seed, **quad_cfg)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad quad settings: {exc}") from exc


# ---------------------------------------------------------------------------
# task expansion and execution
# ---------------------------------------------------------------------------

_RULE_KINDS = (rules.SD, rules.SCALED_SD, rules.DOWNSCALED, rules.QSD,
               rules.ANTI, rules.LAZY)


def _validate_scenario_structure(sc: dict) -> None:
    """Reject unknown family/rule ids up front (config error, exit 2);
    numerical problems are left to surface per scenario at run time."""
    if not isinstance(sc, dict) or "id" not in sc:
        raise ConfigError("each scenario needs an 'id' field")

    def check_density(d, label):
        if d is None:
            return
        if not isinstance(d, dict) or "family" not in d:
            raise ConfigError(f"{label} needs a 'family' field")
        if d["family"] not in densities._FAMILIES:
            raise ConfigError(f"unknown density family {d['family']!r}")

    def check_rule(r):
        if not isinstance(r, dict) or "kind" not in r:
            raise ConfigError("rule spec needs a 'kind' field")
        if r["kind"] not in _RULE_KINDS:
            raise ConfigError(f"unknown rule kind {r['kind']!r}")
        if "base" in r:
            check_rule(r["base"])
        check_density(r.get("tilde"), "auxiliary density")

    check_density(sc.get("truth"), "truth density")
    check_density(sc.get("model"), "model density")
    check_density(sc.get("truth_next"), "next-step truth density")
    if "rule" in sc:
        check_rule(sc["rule"])


def _expand_tasks(cfg: RunConfig) -> List[dict]:
    """Flatten the config into independent, picklable task payloads."""
    tasks = []
    seen = set()

    def add(check_id: str, scenario_id: str, payload: dict):
        if scenario_id in seen:
            raise ConfigError(f"duplicate scenario id {scenario_id!r}")
        seen.add(scenario_id)
        tasks.append({"check": check_id, "id": scenario_id,
                      "payload": payload,
                      "seed": seed_for(cfg.seed, scenario_id),
                      "quad": dict(cfg.quad)})

    for entry in cfg.checks:
        check = entry["check"]
        if check in ("theorem1", "theorem3", "theorem2", "alpha_bounds"):
            for sc in entry.get("scenarios", []):
                _validate_scenario_structure(sc)
                payload = {"scenario": sc}
                if check == "alpha_bounds":
                    payload["grid_n"] = int(entry.get("grid_n", 50))
                    payload["c"] = entry.get("c")
                    payload["cev_alphas"] = entry.get(
                        "cev_alphas", [0.5, 1.9, 2.5])
                add(check, str(sc["id"]), payload)
        elif check == "qsd":
            for sc in entry.get("scenarios", []):
                _validate_scenario_structure(sc)
                add(check, str(sc["id"]), {"qsd": sc})
        elif check == "lemma1":
            grid = entry.get("delta_grid") or list(
                np.geomspace(1e-1, 1e-4, 13))
            for g_id in entry.get("g_ids", ["square", "gauss_pdf", "kink"]):
                add(check, f"lemma1_{g_id}",
                    {"g_id": g_id, "y_t": float(entry.get("y_t", 1.0)),
                     "delta_grid": [float(d) for d in grid]})
        elif check == "figure1":
            add(check, "figure1",
                {"alpha": float(entry.get("alpha", 0.1)),
                 "y_t": float(entry.get("y_t", -1.0)),
                 "theta_pred": float(entry.get("theta_pred", 0.0)),
                 "radius": float(entry.get("radius", 0.1)),
                 "lams": [float(v) for v in
                          entry.get("lams", [0.0, 1.0, -1.0, -1.5])]})
        elif check == "impropriety":
            for sc in _impropriety_scenarios(entry, cfg.seed):
                _validate_scenario_structure(sc)
                add(check, str(sc["id"]),
                    {"scenario": sc,
                     "radius": float(entry.get("radius", 0.2))})
    return tasks


def _impropriety_scenarios(entry: dict, master_seed: int) -> List[dict]:
    """Random-truth and matched-truth gradient steps, plus away-steps that
    must fail the grid precondition."""
    if entry.get("scenarios"):
        return entry["scenarios"]
    rng = np.random.default_rng(seed_for(master_seed, "impropriety_gen"))
    alpha = float(entry.get("alpha", 0.1))
    out = []
    for i in range(int(entry.get("n_random", 24))):
        theta_pred = float(rng.choice([-1.0, 0.0, 1.0]))
        lam = float(rng.uniform(-2.0, 2.5))
        side = 1.0 if rng.uniform() < 0.5 else -1.0
        y_t = theta_pred + side * float(rng.uniform(0.4, 2.0))
        out.append(_gauss_loc_scenario(f"improp_rand_{i:02d}", lam,
                                       theta_pred, y_t,
                                       {"kind": "sd", "alpha": alpha}))
    for i in range(int(entry.get("n_matched", 20))):
        theta_pred = -1.0 + 0.1 * i
        out.append(_gauss_loc_scenario(f"improp_match_{i:02d}", theta_pred,
                                       theta_pred, theta_pred + 1.0,
                                       {"kind": "sd", "alpha": alpha}))
    for i, y_off in enumerate((1.0, -1.5)):
        out.append(_gauss_loc_scenario(f"improp_away_{i}", 0.0, 0.0, y_off,
                                       {"kind": "anti", "alpha": alpha}))
    return out


def _gauss_loc_scenario(sid: str, lam: float, theta_pred: float, y_t: float,
                        rule: dict, **extra) -> dict:
    d = {"id": sid, "truth": {"family": "gaussian_location"}, "lam": lam,
         "model": {"family": "gaussian_location"}, "theta_pred": theta_pred,
         "rule": rule, "y_t": y_t}
    d.update(extra)
    return d


def _row(scenario_id: str, check_id: str, predicted: Optional[int] = None,
         stabilized: Optional[int] = None, boundary: bool = False,
         agrees: bool = False, last_delta: float = float("nan"),
         err: float = float("nan"), status: str = "ok") -> dict:
    return {"scenario_id": scenario_id, "check_id": check_id,
            "predicted_sign": predicted, "stabilized_sign": stabilized,
            "boundary": boundary, "agrees": agrees,
            "last_delta": last_delta, "err_estimate": err, "status": status}


def _row_from_sign_report(r) -> dict:
    return _row(r.scenario_id, r.check_id, r.predicted_sign,
                r.stabilized_sign, r.boundary, r.agrees,
                r.last_delta, r.err_estimate)


def run_task(task: dict) -> List[dict]:
    """Execute one task; never raises, failures become status='failed'."""
    check, sid = task["check"], task["id"]
    try:
        quad = _quad_for(task["quad"], task["seed"])
        payload = task["payload"]
        if check in ("theorem1", "theorem3", "theorem2"):
            s = _scenario_from_dict(payload["scenario"], quad)
            fn = {"theorem1": theorems.check_theorem1,
                  "theorem3": theorems.check_theorem3,
                  "theorem2": theorems.check_theorem2}[check]
            return [_row_from_sign_report(fn(s))]
        if check == "alpha_bounds":
            return [_alpha_bounds_row(payload, quad)]
        if check == "qsd":
            return [_qsd_row(payload["qsd"], quad)]
        if check == "lemma1":
            slope = theorems.check_lemma1(payload["g_id"], payload["y_t"],
                                          payload["delta_grid"], quad)
            ok = slope >= 1.9
            return [_row(sid, check, predicted=1,
                         stabilized=1 if ok else -1, agrees=ok,
                         last_delta=slope, err=0.0)]
        if check == "figure1":
            return _figure1_rows(payload, quad)
        if check == "impropriety":
            return [_impropriety_row(payload, quad)]
        raise ConfigError(f"unknown check id {check!r}")
    except Exception:
        return [_row(sid, check, status="failed")]


def _alpha_bounds_row(payload: dict, quad: QuadSpec) -> dict:
    s = _scenario_from_dict(payload["scenario"], quad)
    c = payload.get("c")
    res = theorems.check_alpha_bounds(
        s, grid_n=payload["grid_n"], c=None if c is None else float(c),
        cev_alphas=[float(a) for a in payload["cev_alphas"]])
    overshoot_alpha, overshoot_delta = res.grid[-1]
    # the criterion: strict decrease below the bound, increase just above,
    # the two bounds ordered, and the closer-in-expectation checks holding
    # exactly when the rate is below 2/c
    cev_ok = all(holds == (a < res.alpha_bar_cev)
                 for a, holds in res.cev_rows)
    agrees = (res.all_negative_below_bound and overshoot_delta > 0.0
              and res.ordered and cev_ok)
    return _row(s.scenario_id, "alpha_bounds", predicted=-1,
                stabilized=-1 if res.all_negative_below_bound else 1,
                agrees=agrees, last_delta=overshoot_delta, err=0.0)


def _qsd_row(spec: dict, quad: QuadSpec) -> dict:
    truth = _density_from_dict(spec["truth"])
    rep = theorems.check_qsd(nu=float(spec["nu"]),
                             theta_pred=float(spec["theta_pred"]),
                             truth=truth, lam=float(spec["lam"]), quad=quad,
                             alpha=float(spec.get("alpha", 0.1)),
                             halvings=int(spec.get("halvings", 8)),
                             scenario_id=str(spec["id"]))
    agrees = rep.agrees
    if not rep.boundary:
        agrees = agrees and (abs(rep.factor2_mc - rep.factor2)
                             <= 3.0 * rep.factor2_mc_se)
    last = rep.steps[-1].value if rep.steps else float("nan")
    err = rep.steps[-1].err if rep.steps else float("nan")
    return _row(spec["id"], "qsd", rep.predicted_sign, rep.stabilized_sign,
                rep.boundary, agrees, last, err)


def _figure1_rows(payload: dict, quad: QuadSpec) -> List[dict]:
    rows = theorems.figure1_data(payload["alpha"], payload["y_t"],
                                 payload["theta_pred"], payload["lams"],
                                 payload["radius"], quad)
    out = []
    for r in rows:
        sid = f"figure1_lam{r['lam']:g}"
        diff = r["p_at_y"] - r["f_pred_at_y"]
        if abs(r["lam"] - payload["theta_pred"]) < 1e-12:
            # matched truth: the trimmed criterion rewards the step even
            # though the global divergence strictly increases
            ok = r["delta_tkl"] < 0.0 and r["delta_kl_global"] > 0.0
            out.append(_row(sid, "figure1", predicted=-1,
                            stabilized=-1 if r["delta_tkl"] < 0 else 1,
                            agrees=ok, last_delta=r["delta_tkl"], err=0.0))
        elif abs(diff) < theorems.BOUNDARY_BAND:
            out.append(_row(sid, "figure1", predicted=0, boundary=True,
                            agrees=True, last_delta=r["delta_ckl"], err=0.0))
        else:
            predicted = -int(np.sign(diff))
            got = int(np.sign(r["delta_ckl"]))
            out.append(_row(sid, "figure1", predicted=predicted,
                            stabilized=got, agrees=(got == predicted),
                            last_delta=r["delta_ckl"], err=0.0))
    return out


def _impropriety_row(payload: dict, quad: QuadSpec) -> dict:
    s = _scenario_from_dict(payload["scenario"], quad)
    rows = theorems.impropriety_demo([s], radius=payload["radius"])
    r = rows[0]
    if not r.precondition_ok:
        return _row(r.scenario_id, "impropriety", predicted=0, boundary=True,
                    agrees=True)
    return _row(r.scenario_id, "impropriety", predicted=-1,
                stabilized=int(np.sign(r.delta_tkl)), agrees=bool(r.passed),
                last_delta=r.delta_tkl, err=0.0)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def write_check_csv(path: str, rows: Sequence[dict], seed: int) -> None:
    lines = [f"# seed={seed}", ",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in CSV_COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run_config(cfg: RunConfig, out_dir: Optional[str] = None,
               seed: Optional[int] = None,
               jobs: Optional[int] = None) -> int:
    """Execute a run; returns the process exit status (0, 1)."""
    if out_dir is not None:
        cfg = dataclasses.replace(cfg, out_dir=out_dir)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=int(seed))
    if jobs is not None:
        cfg = dataclasses.replace(cfg, jobs=int(jobs))
    t0 = time.monotonic()
    tasks = _expand_tasks(cfg)

    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_task, tasks, chunksize=1))
    else:
        results = [run_task(t) for t in tasks]

    rows = [row for chunk in results for row in chunk]
    rows.sort(key=lambda r: (r["check_id"], r["scenario_id"]))

    os.makedirs(cfg.out_dir, exist_ok=True)
    by_check: Dict[str, List[dict]] = {}
    for row in rows:
        by_check.setdefault(row["check_id"], []).append(row)
    for check_id, check_rows in sorted(by_check.items()):
        write_check_csv(os.path.join(cfg.out_dir, f"{check_id}.csv"),
                        check_rows, cfg.seed)

    failed = sum(1 for r in rows if r["status"] == "failed")
    ok_rows = [r for r in rows if r["status"] == "ok"]
    boundary = sum(1 for r in ok_rows if r["boundary"])
    agreed = sum(1 for r in ok_rows if not r["boundary"] and r["agrees"])
    inconclusive = sum(1 for r in ok_rows
                       if not r["boundary"] and not r["agrees"]
                       and r["stabilized_sign"] is None)
    disagreed = sum(1 for r in ok_rows
                    if not r["boundary"] and not r["agrees"]
                    and r["stabilized_sign"] is not None)
    summary = {"checks_run": len(rows), "agreed": agreed,
               "boundary": boundary, "inconclusive": inconclusive,
               "disagreed": disagreed, "failed": failed, "seed": cfg.seed,
               "runtime_ms": round(1000 * (time.monotonic() - t0))}
    with open(os.path.join(cfg.out_dir, "summary.json"), "w",
              encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0 if (failed == 0 and disagreed == 0) else 1


# ---------------------------------------------------------------------------
# figure data emission
# ---------------------------------------------------------------------------

def emit_figure1(out_dir: str, alpha: float = 0.1, y_t: float = -1.0,
                 theta_pred: float = 0.0, radius: float = 0.1,
                 lams: Sequence[float] = (0.0, 1.0, -1.0, -1.5),
                 quad: Optional[QuadSpec] = None,
                 grid_n: int = 501) -> List[str]:
    """Write one density-grid CSV per truth plus the delta table.

    Returns the list of file paths written.
    """
    quad = quad or QuadSpec()
    model = densities.gaussian_location()
    rule = rules.score_driven(model, alpha)
    theta_upd = rules.apply_update(rule, y_t, theta_pred)
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    rows = theorems.figure1_data(alpha, y_t, theta_pred, list(lams), radius,
                                 quad)
    delta_path = os.path.join(out_dir, "figure1_deltas.csv")
    cols = ("lam", "p_at_y", "f_pred_at_y", "f_upd_at_y", "delta_tkl",
            "delta_ckl", "delta_kl_global")
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_fmt(float(r[c])) for c in cols))
    with open(delta_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    paths.append(delta_path)

    labels = "abcdefghijklmnopqrstuvwxyz"
    for i, lam in enumerate(lams):
        # the grid spans the truncation bounds of the widest of the three
        # densities in play for this panel
        bnds = [densities.truncation_bounds(model, th, quad.tail_mass)
                for th in (lam, theta_pred, theta_upd)]
        lo = min(b[0] for b in bnds)
        hi = max(b[1] for b in bnds)
        xs = np.linspace(lo, hi, grid_n)
        p = densities.pdf(model, xs, lam)
        f_pred = densities.pdf(model, xs, theta_pred)
        f_upd = densities.pdf(model, xs, theta_upd)
        label = labels[i] if i < len(labels) else str(i)
        path = os.path.join(out_dir, f"figure1_panel_{label}.csv")
        lines = ["x,p,f_pred,f_upd"]
        for j in range(grid_n):
            lines.append(",".join(_fmt(float(v)) for v in
                                  (xs[j], p[j], f_pred[j], f_upd[j])))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# bundled full verification config
# ---------------------------------------------------------------------------

def default_verify_config(seed: int = 42, jobs: int = 1,
                          out_dir: str = "out") -> RunConfig:
    """The full verification grid: every check, both density roles."""
    t1_scenarios = []
    y_grid = (-2.0, -1.0, 0.5, 1.0, 2.0)
    theta_grid = (-1.0, 0.0, 1.0)
    lam_grid = (-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5)
    for y_t in y_grid:
        for th in theta_grid:
            for lam in lam_grid:
                sid = f"t1_loc_y{y_t:g}_th{th:g}_lam{lam:g}"
                t1_scenarios.append(_gauss_loc_scenario(
                    sid, lam, th, y_t, {"kind": "sd", "alpha": 0.1}))
    scale_theta = (0.5, 1.0, 2.0)
    scale_lam = (0.5, 1.0, 1.5, 2.0, 3.0)
    for y_t in y_grid:
        for th in scale_theta:
            for lam in scale_lam:
                sid = f"t1_scale_y{y_t:g}_th{th:g}_lam{lam:g}"
                t1_scenarios.append({
                    "id": sid, "truth": {"family": "gaussian_scale"},
                    "lam": lam, "model": {"family": "gaussian_scale"},
                    "theta_pred": th, "rule": {"kind": "sd", "alpha": 0.05},
                    "y_t": y_t})
    # forward variants: the localized comparison against an independently
    # chosen next-step truth
    for i, (lam, lam_next, y_t) in enumerate(
            [(0.0, 1.5, -1.0), (1.0, -1.0, 0.5), (0.5, 2.0, 2.0),
             (-1.0, 0.5, -2.0)]):
        t1_scenarios.append(_gauss_loc_scenario(
            f"t1_fwd_{i}", lam, 0.0, y_t, {"kind": "sd", "alpha": 0.1},
            forward=True, truth_next={"family": "gaussian_location"},
            lam_next=lam_next))

    t3_scenarios = []
    t3_rules = [("scaled2", {"kind": "scaled_sd", "alpha": 0.1,
                             "scale": 2.0}),
                ("anti", {"kind": "anti", "alpha": 0.1}),
                ("down", {"kind": "downscaled", "kappa": 0.5,
                          "base": {"kind": "sd", "alpha": 0.2}})]
    for y_t in (-1.0, 1.0):
        for lam in (-1.0, 1.0):
            for tag, rd in t3_rules:
                sid = f"t3_{tag}_y{y_t:g}_lam{lam:g}"
                t3_scenarios.append(_gauss_loc_scenario(sid, lam, 0.0, y_t,
                                                        rd))

    t2_scenarios = [
        _gauss_loc_scenario("t2_sd", 1.0, 0.0, None,
                            {"kind": "sd", "alpha": 0.1},
                            scale0=1.0, halvings=8),
        _gauss_loc_scenario("t2_anti", 1.0, 0.0, None,
                            {"kind": "anti", "alpha": 0.1},
                            scale0=1.0, halvings=8),
        _gauss_loc_scenario("t2_lazy", 1.0, 0.0, None,
                            {"kind": "lazy", "freeze_prob": 0.9,
                             "base": {"kind": "sd", "alpha": 0.1}},
                            scale0=1.0, halvings=8),
        _gauss_loc_scenario("t2_boundary", 0.0, 0.0, None,
                            {"kind": "sd", "alpha": 0.1},
                            scale0=1.0, halvings=8),
    ]

    ab_scenarios = [
        _gauss_loc_scenario("ab_m1", 1.0, 0.0, None,
                            {"kind": "sd", "alpha": 0.1}),
        _gauss_loc_scenario("ab_m2", 2.0, 0.0, None,
                            {"kind": "sd", "alpha": 0.1}),
    ]

    qsd_scenarios = [
        {"id": "qsd_nu5", "nu": 5.0, "theta_pred": 1.0,
         "truth": {"family": "gaussian_scale"}, "lam": 2.0},
        {"id": "qsd_nu200", "nu": 200.0, "theta_pred": 1.0,
         "truth": {"family": "gaussian_scale"}, "lam": 2.0},
        {"id": "qsd_matched", "nu": 5.0, "theta_pred": 1.0,
         "truth": {"family": "gaussian_scale"}, "lam": 1.0},
    ]

    checks = [
        {"check": "theorem1", "scenarios": t1_scenarios},
        {"check": "theorem3", "scenarios": t3_scenarios},
        {"check": "theorem2", "scenarios": t2_scenarios},
        {"check": "alpha_bounds", "scenarios": ab_scenarios, "c": 1.0},
        {"check": "qsd", "scenarios": qsd_scenarios},
        {"check": "lemma1", "y_t": 1.0},
        {"check": "figure1"},
        {"check": "impropriety", "n_random": 24, "n_matched": 20},
    ]
    return RunConfig(checks=checks, out_dir=out_dir, seed=seed, jobs=jobs)
