"""Command-line interface ``cvlab``.

Exit codes: 0 every point OK, 2 some points were excluded, 1 error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .errors import CvlabError

EXIT_OK, EXIT_ERROR, EXIT_EXCLUSIONS = 0, 1, 2


def _cmd_run(args) -> int:
    from .scan import emit_plotdata, load_config, run

    cfg = load_config(args.config)
    result = run(cfg, out_dir=args.out, workers=args.workers, probe=args.convergence_probe)
    m = result.manifest
    n_ok = sum(1 for p in m["points"] if p["status"] == "ok")
    print(f"{m['experiment']}: {n_ok}/{len(m['points'])} points OK -> {result.out_dir}")
    for ex in m["exclusions"]:
        print(f"  excluded point {ex['point']} {ex['coords']}: {ex['reason']} ({ex['detail']})")
    if args.convergence_probe:
        c = m["convergence"]
        print(f"  convergence probe: {'passed' if c['passed'] else 'FAILED'} worst={c['worst']}")
    if args.plotdata:
        for path in emit_plotdata(result.out_dir):
            print(f"  plotdata {path}")
    return result.exit_code


def _cmd_oracle(args) -> int:
    from .scan import from_dict, run

    doc = {
        "experiment": "oracle-check",
        "options": {"oracle_seeds": args.seeds, "oracle_horizon": args.horizon},
    }
    if args.cutoff is not None:
        doc["options"]["oracle_cutoff"] = args.cutoff
    result = run(from_dict(doc), out_dir=args.out, workers=args.workers)
    for p in result.manifest["points"]:
        for c in p["summary"].get("comparisons", []):
            verdict = "PASS" if c["passed"] else ("VOID" if c["error"] else "FAIL")
            print(f"seed {c['seed']:2d} {c['generator']:<10} n_bar={c['n_bar']:<4g} "
                  f"cutoffs={'x'.join(map(str, c['cutoffs'])):<8} "
                  f"max|dE_N|={c['max_abs_dEN']:.3e} leakage={c['leakage']:.2e} {verdict}")
    s = result.manifest["summary"]
    print(f"{s['comparisons']} comparisons, {s['failed']} failed, {s['voided']} void; "
          f"worst max|dE_N| = {s['max_abs_dEN']}")
    return result.exit_code


def _cmd_freeze(args) -> int:
    from .dynamics import (
        FreezingSpec,
        coefficient_decay_ok,
        freezing_delta_star,
        freezing_gamma_bound,
    )

    spec = FreezingSpec(args.tn, args.n, args.ts, args.ns)
    delta = freezing_delta_star(args.gamma, args.tn, args.n, args.kappa)
    bound = freezing_gamma_bound(spec)
    print(f"delta_AE_star = {delta:.10g}")
    print(f"gamma_bound = {bound:.10g}")
    print(f"gamma_above_bound = {'yes' if args.gamma > bound else 'no'}")
    ok = coefficient_decay_ok(args.gamma, delta, spec, args.kappa)
    print(f"coefficient_decay_ok = {'yes' if ok else 'no'}")
    return EXIT_OK


def _cmd_plotdata(args) -> int:
    from .scan import emit_plotdata

    for path in emit_plotdata(args.run_dir, args.out):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cvlab {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress per grid point")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute an experiment configuration")
    r.add_argument("config", help="YAML or JSON configuration file")
    r.add_argument("--out", help="output directory (default: config 'output' or runs/<experiment>)")
    r.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    r.add_argument("--convergence-probe", action="store_true",
                   help="rerun every point with halved sampling and tighter tolerances")
    r.add_argument("--plotdata", action="store_true", help="also write plot-ready panel files")
    r.set_defaults(func=_cmd_run)

    o = sub.add_parser("oracle-check", help="compare the Fock oracle with the Gaussian pipeline")
    o.add_argument("--cutoff", type=int, default=None,
                   help="fixed Fock cutoff per mode (default: sized from the input state)")
    o.add_argument("--seeds", type=int, default=20, help="number of random inputs (default 20)")
    o.add_argument("--horizon", type=float, default=4.0, help="comparison horizon in 1/kappa")
    o.add_argument("--workers", type=int, default=1)
    o.add_argument("--out", default="runs/oracle-check")
    o.set_defaults(func=_cmd_oracle)

    f = sub.add_parser("freeze-calc", help="critical detuning and memory bound")
    f.add_argument("--gamma", type=float, required=True)
    f.add_argument("--tn", type=float, required=True, help="moment-decay time t_n")
    f.add_argument("--n", type=float, required=True, help="moment-decay factor n")
    f.add_argument("--ts", type=float, default=5.0, help="coefficient-decay time t_s")
    f.add_argument("--ns", type=float, default=100.0, help="coefficient-decay factor n_s")
    f.add_argument("--kappa", type=float, default=1.0)
    f.set_defaults(func=_cmd_freeze)

    d = sub.add_parser("plotdata", help="write plot-ready panel files for a run directory")
    d.add_argument("run_dir")
    d.add_argument("--out", default=None)
    d.set_defaults(func=_cmd_plotdata)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CvlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
