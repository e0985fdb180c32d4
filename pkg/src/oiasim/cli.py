"""Command-line interface.

Subcommands: simulate, table1, figure, analytic expectation, analytic
threshold.  `simulate` also accepts a JSON config file carrying the same
field names as the flags; explicit flags win on conflict.
"""

import argparse
import json
import sys

from . import analytic, harness


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _parse_feedback(text: str) -> float | None:
    """'full' -> None; 'threshold:<load>' -> load."""
    if text == "full":
        return None
    if text.startswith("threshold:"):
        load = float(text.split(":", 1)[1])
        if not 0.0 < load <= 1.0:
            raise ValueError("threshold load must be in (0, 1]")
        return load
    raise ValueError(f"feedback must be 'full' or 'threshold:<load>', got {text!r}")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oiasim",
                                description="Opportunistic interference alignment simulator")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo sweep")
    sim.add_argument("--config", help="JSON file with the same field names as the flags")
    sim.add_argument("--schemes", help="comma list from: max-sinr,max-snr,oia,coia")
    sim.add_argument("--k", type=int, help="UEs per cell")
    sim.add_argument("--s", type=int, help="codebook size (coia)")
    sim.add_argument("--snr-db", help="comma list of SNR points in dB")
    sim.add_argument("--trials", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--feedback", help="full | threshold:<load>")
    sim.add_argument("--metric", choices=("gamma", "alpha"), help="coia selection metric")
    sim.add_argument("--power-ratio", type=float, help="interference-to-signal power ratio")
    sim.add_argument("--out", help="CSV output path (stdout if omitted)")

    tab = sub.add_parser("table1", help="analytic expectation grid over K and S")
    tab.add_argument("--ks", default="10,15,20", help="comma list of K values")
    tab.add_argument("--ss", default="1,2,3,4", help="comma list of S values")
    tab.add_argument("--out")

    fig = sub.add_parser("figure", help="run a preconfigured figure sweep")
    fig.add_argument("--id", type=int, required=True, choices=(1, 2, 3))
    fig.add_argument("--k", type=int)
    fig.add_argument("--snr-db")
    fig.add_argument("--trials", type=int, default=harness.DEFAULT_TRIALS)
    fig.add_argument("--seed", type=int, default=1)
    fig.add_argument("--power-ratio", type=float, default=1.0)
    fig.add_argument("--out")

    ana = sub.add_parser("analytic", help="closed-form quantities")
    anasub = ana.add_subparsers(dest="analytic_command", required=True)
    exp = anasub.add_parser("expectation", help="expected selected alignment metric")
    exp.add_argument("--k", type=int, required=True)
    exp.add_argument("--s", type=int, required=True)
    thr = anasub.add_parser("threshold", help="threshold for a target feedback load")
    thr.add_argument("--scheme", required=True, choices=("oia", "maxsnr", "coia"))
    thr.add_argument("--load", type=float, required=True)
    thr.add_argument("--theta", type=float)
    return p


_SIMULATE_DEFAULTS = {
    "schemes": "coia",
    "k": 10,
    "s": 1,
    "snr_db": ",".join(str(x) for x in harness.DEFAULT_SNR_GRID_DB),
    "trials": harness.DEFAULT_TRIALS,
    "seed": 1,
    "feedback": "full",
    "metric": "gamma",
    "power_ratio": 1.0,
    "out": None,
}


def _simulate(args) -> int:
    settings = dict(_SIMULATE_DEFAULTS)
    if args.config:
        with open(args.config) as f:
            loaded = json.load(f)
        unknown = set(loaded) - set(settings)
        if unknown:
            raise SystemExit(f"unknown config fields: {sorted(unknown)}")
        settings.update(loaded)
    for name in settings:
        flag = getattr(args, name, None)
        if flag is not None:
            settings[name] = flag

    schemes_field = settings["schemes"]
    kinds = schemes_field if isinstance(schemes_field, (list, tuple)) \
        else [x.strip() for x in str(schemes_field).split(",") if x.strip()]
    load = _parse_feedback(str(settings["feedback"]))
    snr = settings["snr_db"]
    snr = tuple(float(x) for x in snr) if isinstance(snr, (list, tuple)) else _float_list(str(snr))

    variants = []
    for kind in kinds:
        variants.append(harness.SchemeVariant(
            kind=kind,
            s=int(settings["s"]) if kind == "coia" else 1,
            metric=str(settings["metric"]) if kind == "coia" else "gamma",
            target_load=None if kind == "max-sinr" else load,
        ))
    spec = harness.ExperimentSpec(
        schemes=tuple(variants), k=int(settings["k"]), snr_db=snr,
        trials=int(settings["trials"]), seed=int(settings["seed"]),
        power_ratio=float(settings["power_ratio"]))
    rows = harness.run(spec)
    _emit(harness.csv_text(rows, harness.spec_header(spec)), settings["out"])
    return 0


def _table1(args) -> int:
    grid = harness.table1(_int_list(args.ks), _int_list(args.ss))
    lines = ["k,s,expected_selected_metric"]
    lines += [f"{k},{s},{val!r}" for k, s, val in grid]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _figure(args) -> int:
    snr = _float_list(args.snr_db) if args.snr_db else None
    rows, headers = harness.figure(args.id, k=args.k, snr_db=snr, trials=args.trials,
                                   seed=args.seed, power_ratio=args.power_ratio)
    _emit(harness.csv_text(rows, headers), args.out)
    return 0


def _analytic(args) -> int:
    if args.analytic_command == "expectation":
        val = analytic.expected_selected_metric(args.k, args.s)
    else:
        val = analytic.solve_threshold(args.scheme, args.load, args.theta)
    sys.stdout.write(f"{val!r}\n")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "simulate":
        return _simulate(args)
    if args.command == "table1":
        return _table1(args)
    if args.command == "figure":
        return _figure(args)
    return _analytic(args)


if __name__ == "__main__":
    sys.exit(main())
