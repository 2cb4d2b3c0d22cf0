"""Command-line front end.

    leakybose bogoliubov --config scenario.yaml
    leakybose evolve     --config scenario.yaml --out traj.csv
    leakybose states     --config scenario.yaml --format json
    leakybose measure    --config scenario.yaml
    leakybose interfere  --config scenario.yaml --seed 7

Exit codes: 0 success, 2 validation error, 3 regime error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import bogoliubov, evolution, fock, measurement, states
from .config import ScenarioConfig, load_config
from .errors import LeakyBoseError, RegimeError, ValidationError


def _num(x):
    """JSON/CSV-safe scalar: shortest round-trip float, None for NaN."""
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return None if math.isnan(x) else x


def _cell(x) -> str:
    x = _num(x)
    return "" if x is None else repr(x)


def render_records(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{k: _num(v) if not isinstance(v, str) else v for k, v in r.items()} for r in records], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(records[0].keys())
    for r in records:
        writer.writerow(v if isinstance(v, str) else _cell(v) for v in r.values())
    return buf.getvalue()


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({k: v if isinstance(v, str) else _num(v) for k, v in report.items()}, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["quantity", "value"])
    for k, v in report.items():
        writer.writerow([k, v if isinstance(v, str) else _cell(v)])
    return buf.getvalue()


def cmd_bogoliubov(cfg: ScenarioConfig) -> dict:
    p = cfg.gas
    opts = cfg.section("bogoliubov")
    q_max = opts.get("q_max")
    n_quad = opts.get("n_quad") or 32
    if q_max is not None:
        q_max = q_max * p.healing_q if p.a > 0 else None  # config gives the cutoff in healing units
    dc = bogoliubov.derived_constants(p, q_max, n_quad)
    s2, s4 = bogoliubov.mode_sums(p, q_max, n_quad)
    stats = bogoliubov.semiclassical_number_stats(p, q_max=q_max, n_quad=n_quad)
    report = {
        "units": "SI" if cfg.si else "reduced",
        "N": p.N,
        "n_a3": p.diluteness,
        "g": dc.g,
        "mu": dc.mu,
        "healing_q": dc.healing_q,
        "depletion": s2 / p.V,
        "n0": dc.n0,
        "n0_over_n": dc.Z,
        "energy": bogoliubov.ground_state_energy(p),
        "energy_factor": bogoliubov.lhy_factor(p),
        "mean_N_cl": stats.mean,
        "var_N_cl": stats.var,
        "fano_cl": stats.fano,
        "sum_sinh4": s4,
    }
    J = cfg.J
    if cfg.flux is not None:
        J = bogoliubov.leakage_flux(p, cfg.flux, dc.n0)
    report["J"] = J
    if J is not None and cfg.J_cr is not None:
        report["J_within_critical"] = bogoliubov.check_flux_bound(J, cfg.J_cr)
    return report


def cmd_evolve(cfg: ScenarioConfig) -> list[dict]:
    if cfg.schedule is None:
        raise cfg.error("missing section", "schedule")
    traj = evolution.trajectory(cfg.schedule)
    return [r._asdict() for r in traj.rows]


def cmd_states(cfg: ScenarioConfig) -> list[dict]:
    opts = cfg.section("states")
    N = opts.get("N") or cfg.gas.N
    phi = opts.get("phi") or 0.0
    xi_sq = opts.get("xi_sq")
    if xi_sq is None:
        xi_sq = min(25.0, N / 100)
    alpha_sq = opts.get("alpha_sq") or float(N)
    built = [
        ("NSIB", states.nsib(N)),
        ("CSIB", states.csib(math.sqrt(alpha_sq) * np.exp(1j * phi))),
        ("NPIB", states.npib(states.NpibLabel.from_polar(xi_sq, phi, N))),
    ]
    records = []
    for name, st in built:
        mean, var = fock.number_moments(st)
        pe = fock.phase_operator_expectations(st)
        try:
            npup = states.npup(st)
        except RegimeError:
            npup = None
        records.append(
            {
                "state": name,
                "mean_n": mean,
                "var_n": var,
                "fano": var / mean,
                "cos_phi": pe.cos,
                "sin_phi": pe.sin,
                "cos2_phi": pe.cos2,
                "sin2_phi": pe.sin2,
                "npup": npup,
            }
        )
    return records


def _measure_time(cfg: ScenarioConfig, opts: dict) -> tuple[int, float]:
    if cfg.J is None:
        raise cfg.error("an explicit flux.J is required", "flux", "J")
    t = opts.get("t")
    if t is None:
        raise cfg.error("missing required key", "measure", "t")
    N = cfg.schedule.N if cfg.schedule else cfg.gas.N
    return N, cfg.J * t


def cmd_measure(cfg: ScenarioConfig) -> dict:
    opts = cfg.section("measure")
    kind = opts.get("kind") or "phase"
    N, jt = _measure_time(cfg, opts)
    pre = evolution.rho_nsib_mixture(N, jt)
    if kind == "number":
        center = opts.get("center")
        if center is None or center != int(center):
            raise cfg.error("number measurement needs an integer center", "measure", "center")
        win = measurement.NumberWindow(int(center), opts.get("err") or 0.0, opts.get("shape") or "kronecker")
        post = measurement.number_measurement_poststate(pre, win)
        rel = None
    elif kind == "phase":
        center = opts.get("center") or 0.0
        kernel = measurement.PhaseKernel(center, opts.get("err") or math.pi, opts.get("shape") or "von-mises")
        post = measurement.phase_measurement_poststate(N, jt, kernel, opts.get("M_phi"))
        rel = measurement.relative_phase_expectations(post, kernel.center)
        pre = evolution.rho_prm_npib(N, jt, len(post), post.M_max)
    else:
        raise cfg.error("kind must be number or phase", "measure", "kind")
    rho_pre, rho_post = fock.to_dense(pre), fock.to_dense(post)
    mean, var = fock.mixture_number_moments(post)
    pe = fock.mixture_phase_expectations(post)
    report = {
        "kind": kind,
        "jt": jt,
        "mean_n": mean,
        "var_n": var,
        "purity": fock.purity(rho_post),
        "trace_distance_to_pre": fock.trace_distance(rho_pre, rho_post),
        "cos_phi": pe.cos,
        "sin_phi": pe.sin,
        "sin2_phi": pe.sin2,
    }
    if rel is not None:
        report["cos_rel"], report["sin_rel"] = rel
    return report


def cmd_interfere(cfg: ScenarioConfig) -> tuple[list[dict], dict]:
    opts = cfg.section("interfere")

    def box(key):
        b = opts.get(key)
        if not b or "N" not in b or "Jt" not in b:
            raise cfg.error("needs N and Jt", "interfere", key)
        return measurement.Box(int(b["N"]), float(b["Jt"]))

    box_a, box_b = box("box_a"), box("box_b")
    err = opts.get("err")
    if err is None:
        raise cfg.error("missing required key", "interfere", "err")
    runs = opts.get("runs") or 1
    shape = opts.get("shape") or "von-mises"
    summary = measurement.interference_experiment(cfg.seed, runs, box_a, box_b, err, shape, opts.get("M_phi"))
    records = [{"run": i, "relative_phase": float(ph)} for i, ph in enumerate(summary.relative_phases)]
    prm_a = evolution.rho_prm_npib(box_a.N, box_a.Jt, len(summary.mean_post_a), summary.mean_post_a.M_max)
    stats = {
        "runs": runs,
        "seed": cfg.seed,
        "uniformity_pvalue_32bins": measurement.uniformity_pvalue(summary.relative_phases) if runs >= 32 else None,
        "mean_post_a_distance_to_prm": fock.trace_distance(fock.to_dense(summary.mean_post_a), fock.to_dense(prm_a)),
    }
    return records, stats


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario YAML file")
    common.add_argument("--out", help="output path (default: config output.path or stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--seed", type=int, help="random seed (overrides config)")
    common.add_argument("--si", action="store_true", help="read the config in SI units with physical hbar")

    ap = argparse.ArgumentParser(prog="leakybose", description="Leaking Bose condensate simulations")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("bogoliubov", "semiclassical Bogoliubov quantities"),
        ("evolve", "order-parameter trajectory against Jt"),
        ("states", "NSIB/CSIB/NPIB statistics"),
        ("measure", "post-measurement state summary"),
        ("interfere", "two-box interference runs"),
    ]:
        sub.add_parser(name, parents=[common], help=help_)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            cfg = load_config(args.config, si=args.si)
        if args.seed is not None:
            if args.seed < 0:
                raise ValidationError("--seed must be non-negative")
            cfg.seed = args.seed
        fmt = args.format or cfg.output_format
        out = args.out or cfg.output_path
        if args.command == "bogoliubov":
            text = render_report(cmd_bogoliubov(cfg), fmt)
        elif args.command == "evolve":
            text = render_records(cmd_evolve(cfg), fmt)
        elif args.command == "states":
            text = render_records(cmd_states(cfg), fmt)
        elif args.command == "measure":
            text = render_report(cmd_measure(cfg), fmt)
        else:
            records, stats = cmd_interfere(cfg)
            if fmt == "json":
                text = json.dumps({"summary": {k: _num(v) for k, v in stats.items()}, "runs": records}, indent=2) + "\n"
            else:
                text = render_records(records, fmt)
                print(render_report(stats, "csv"), end="", file=sys.stderr)
        _emit(text, out)
    except LeakyBoseError as exc:
        print(f"leakybose {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
