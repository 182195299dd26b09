"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fixed_rate, threshold
from .audit import audit_monotone, audit_props, audit_truthful
from .config import ExperimentConfig, load_config
from .cost import CostFn, over_time_cost_fn
from .dist import from_config as dist_from_config
from .errors import ConfigError, InvariantError
from .ironing import iron
from .oracle import (DiscreteSetting, brute_force_menu, discrete_value,
                     discretization_bound)
from .reward import NEGATIVE, fr_virtual_value, horizon_virtual_value
from .sim import RentalMechanism, replay, simulate
from .swac import FiniteMenuSwac, example_1_1
from .tables import to_csv, write_csv


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _plans_doc(cfg: ExperimentConfig, mech: RentalMechanism, R) -> dict:
    doc = mech.to_dict()
    doc["distributions"] = [d.to_config() for d in cfg.distributions]
    doc["R"] = list(R)
    return doc


def _load_mech(path: str) -> tuple[RentalMechanism, list]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read mechanism: {exc.strerror}", path) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", path) from None
    try:
        mech = RentalMechanism.from_dict(doc)
        ds = [dist_from_config(d, f"distributions[{i}]") for i, d in enumerate(doc["distributions"])]
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", path) from None
    return mech, ds


def cmd_compute_fixed_rate(args) -> int:
    cfg = load_config(args.config)
    plans = fixed_rate.precompute_fixed_rate(cfg.horizon, cfg.shared, cfg.reward, cfg.ironing_grid,
                                             cfg.normalize_base_payment)
    mech = fixed_rate.rental_mechanism(plans)
    out = args.out or cfg.outputs.get("plans")
    if out:
        Path(out).write_text(json.dumps(_plans_doc(cfg, mech, plans.R.R), indent=1))
    rows = [(p.horizon, J.alloc, J.left, J.right, J.v_left, J.v_right, J.prob, J.total)
            for p in plans.plans for J in p.intervals]
    header = ("horizon", "alloc", "psi_left", "psi_right", "v_left", "v_right", "prob", "total")
    if args.csv_dir:
        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_csv(d / "intervals.csv", header, rows)
        write_csv(d / "rewards.csv", ("horizon", "R"), enumerate(plans.R.R))
    else:
        _emit(to_csv(header, rows), None)
        _emit(to_csv(("horizon", "R"), enumerate(plans.R.R)), None)
    return 0


def cmd_compute_threshold(args) -> int:
    cfg = load_config(args.config)
    cfg.check_family("threshold")
    plan = threshold.precompute_threshold(cfg.horizon, cfg.shared, cfg.reward, cfg.ironing_grid,
                                          analytic=cfg.analytic or args.analytic)
    mech = threshold.rental_mechanism(plan)
    out = args.out or cfg.outputs.get("plans")
    if out:
        Path(out).write_text(json.dumps(_plans_doc(cfg, mech, plan.R.R), indent=1))
    rows = [(h, plan.tau[h], plan.R[h], plan.R[h] / h if h else float("nan"))
            for h in range(0, plan.n + 1)]
    _emit(to_csv(("horizon", "tau", "R", "R_per_day"), rows), args.csv)
    return 0


def cmd_simulate(args) -> int:
    mech, ds = _load_mech(args.mech)
    res = simulate(mech, ds if len(ds) > 1 else ds[0], args.seed, args.episodes,
                   log_episodes=args.log_episodes)
    bad = [i for i, log in enumerate(res.logs) if not replay(log).ok]
    if bad:
        raise InvariantError(f"replay found inconsistencies in logged episodes {bad}")
    print(f"mechanism={mech.name} n={mech.n} episodes={res.episodes} seed={args.seed}")
    print(f"mean={res.mean!r} stderr={res.stderr!r}")
    if args.out:
        rows = [(e, r.day, r.horizon, r.arrival_valuation, r.available, r.alloc,
                 r.renter_valuation, r.payment)
                for e, log in enumerate(res.logs) for r in log.records]
        write_csv(args.out, ("episode", "day", "horizon", "arrival_valuation", "available",
                             "alloc", "renter_valuation", "payment"), rows)
    return 0


def _audit_rows(menu: FiniteMenuSwac, g, c, grid: int):
    t = audit_truthful(menu, grid)
    mono = audit_monotone(menu, g, c, grid)
    props = audit_props(menu, g, c, min(grid, 300))
    return t, mono, props


def cmd_audit(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        cfg.check_family("custom_menu")
        menu_path = Path(args.config).parent / cfg.menu_file
        menu = FiniteMenuSwac.from_dict(json.loads(menu_path.read_text()))
        g = cfg.reward
        menus = [(menu.horizon, menu, None)]
    elif args.menu:
        menu = FiniteMenuSwac.from_dict(json.loads(Path(args.menu).read_text()))
        from .reward import from_config
        g = from_config(json.loads(args.reward), "reward")
        menus = [(menu.horizon, menu, None)]
    else:
        mech, _ = _load_mech(args.mech)
        g = mech.g
        doc = json.loads(Path(args.mech).read_text())
        R = doc.get("R")
        menus = [(h, mech.swac(h), over_time_cost_fn(R, h) if R else None)
                 for h in range(mech.n, 0, -1)]
    rows = []
    for h, menu, c in menus:
        t, mono, props = _audit_rows(menu, g, c, args.grid)
        rows.append((h, t.ok, len(t.violations), mono.allocation_monotone, mono.reward_monotone,
                     props.ok))
    _emit(to_csv(("horizon", "truthful", "violations", "allocation_monotone", "reward_monotone",
                  "props_ok"), rows), args.csv)
    return 0


def cmd_oracle_compare(args) -> int:
    cfg = load_config(args.config)
    if not cfg.iid:
        raise ConfigError("oracle-compare needs a single shared distribution", "distributions")
    d, g, n = cfg.distributions[0], cfg.reward, cfg.horizon
    if g.kind == NEGATIVE:
        plan = threshold.precompute_threshold(n, d, g, cfg.ironing_grid, analytic=cfg.analytic)
        R, alg_menu = plan.R, threshold.as_menu(plan, n)
    else:
        plans = fixed_rate.precompute_fixed_rate(n, d, g, cfg.ironing_grid)
        R, alg_menu = plans.R, fixed_rate.as_menu(plans.plan(n))
    grid = d.discretize(args.k)
    s = DiscreteSetting(grid, n, DiscreteSetting.default_levels(grid), g, over_time_cost_fn(R, n))
    res = brute_force_menu(s)
    alg = discrete_value(alg_menu, s)
    bound = discretization_bound(args.k, n)
    print(f"k={args.k} n={n} oracle={res.reward!r} algorithm={alg!r} "
          f"gap={res.reward - alg!r} bound={bound!r} within={abs(res.reward - alg) <= bound}")
    print("witness menu:")
    for e in res.menu.entries:
        print(f"  [{e.left:.6g}, {e.right:.6g}) alloc={e.alloc} total={e.total!r} filter={e.filter!r}")
    return 0


def cmd_gap_table(args) -> int:
    n_max = args.n_max
    taus, ells = threshold.uniform_recurrence(n_max)
    if args.fixed_rate == "algorithm":
        from .dist import Uniform
        from .reward import RewardFn
        plans = fixed_rate.precompute_fixed_rate(n_max, Uniform(0.0, 1.0), RewardFn.consumer_surplus(),
                                                 validate=False)
        R_fr = plans.R.R
    else:
        R_fr = [0.5 * n for n in range(n_max + 1)]
    rows = [(n, n * ells[n], R_fr[n], n * ells[n] / R_fr[n]) for n in range(1, n_max + 1)]
    _emit(to_csv(("n", "R_threshold", "R_fixed_rate", "ratio"), rows), args.out)
    return 0


def cmd_iron_dump(args) -> int:
    cfg = load_config(args.config)
    h = args.horizon or cfg.horizon
    d = cfg.distributions[cfg.horizon - h]
    g = cfg.reward
    if args.which == "threshold":
        theta = lambda v: horizon_virtual_value(g, d, h, v)  # noqa: E731
    else:
        theta = lambda v: fr_virtual_value(g, d, v)  # noqa: E731
    ir = iron(theta, d, cfg.ironing_grid)
    q = np.linspace(0.0, 1.0, args.points)
    v = np.asarray(d.quantile(q))
    raw = np.asarray(theta(v), dtype=float)
    rows = zip(q.tolist(), v.tolist(), raw.tolist(), np.asarray(ir.at_quantile(q)).tolist())
    _emit(to_csv(("quantile", "valuation", "raw", "ironed"), rows), args.out)
    return 0


def cmd_example_1_1(args) -> int:
    from .reward import RewardFn

    m = example_1_1()
    g, c = RewardFn.revenue(), CostFn.zero(m.horizon)
    t = audit_truthful(m, 1000)
    mono = audit_monotone(m, g, c, np.arange(0.0, 9.0))
    props = audit_props(m, g, c, 200)
    yn = lambda b: "yes" if b else "no"  # noqa: E731
    print(f"truthful={yn(t.ok)} violations={len(t.violations)} grid={t.grid}")
    print(f"allocation-monotone={yn(mono.allocation_monotone)} witness={mono.allocation_witness} "
          f"allocations={mono.allocation_values}")
    print(f"reward-monotone={yn(mono.reward_monotone)} witness={mono.reward_witness} "
          f"rewards={mono.reward_values}")
    print(f"pairwise-properties={yn(props.ok)} filter-witnesses={len(props.filter_witnesses)}")
    if args.out:
        Path(args.out).write_text(json.dumps(m.to_dict(), indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rentmech", description="Optimal rental mechanisms with stagewise-IR agents.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("compute-fixed-rate", help="fixed-rate plans and reward table")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="plans.json destination")
    s.add_argument("--csv-dir", help="write intervals.csv and rewards.csv here instead of stdout")
    s.set_defaults(func=cmd_compute_fixed_rate)

    s = sub.add_parser("compute-threshold", help="one-or-all threshold plans")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="plans.json destination")
    s.add_argument("--csv", help="threshold table destination (default stdout)")
    s.add_argument("--analytic", action="store_true", help="closed-form ironing (uniform only)")
    s.set_defaults(func=cmd_compute_threshold)

    s = sub.add_parser("simulate", help="Monte-Carlo run of a saved mechanism")
    s.add_argument("--mech", required=True, help="plans.json from a compute-* command")
    s.add_argument("--episodes", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--log-episodes", type=int, default=3)
    s.add_argument("--out", help="per-day CSV of the logged episodes")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("audit", help="truthfulness / monotonicity / pairwise audits")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--mech", help="plans.json")
    grp.add_argument("--menu", help="single SWAC JSON")
    grp.add_argument("--config", help="custom_menu config; menu_file is relative to it")
    s.add_argument("--reward", default='{"class": "revenue"}', help="reward JSON for --menu")
    s.add_argument("--grid", type=int, default=1000)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("oracle-compare", help="brute-force optimum vs algorithm on a discretized prior")
    s.add_argument("--config", required=True)
    s.add_argument("--k", type=int, default=8)
    s.set_defaults(func=cmd_oracle_compare)

    s = sub.add_parser("gap-table", help="threshold vs fixed-rate reward, Uniform[0,1] consumer surplus")
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--fixed-rate", choices=("algorithm", "closed-form"), default="algorithm")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gap_table)

    s = sub.add_parser("iron-dump", help="raw and ironed virtual values as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--horizon", type=int)
    s.add_argument("--which", choices=("fixed-rate", "threshold"), default="fixed-rate")
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--out")
    s.set_defaults(func=cmd_iron_dump)

    s = sub.add_parser("example-1-1", help="audit the introductory two-offer menu")
    s.add_argument("--out", help="write the menu JSON here")
    s.set_defaults(func=cmd_example_1_1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
