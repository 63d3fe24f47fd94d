"""Batch front-end: bound sweeps, QKD curves, swap/chain reports, selftest.

Every command is deterministic given its flags and seed; CSV output is
written with 12 significant digits so identical runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds, chain, qkd, selftest, states, swap
from .qcore import ALL_LABELS, PauliLabel, bell_vector

DEFAULT_SEED = 20240613


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) if not isinstance(v, str) else v
                                  for v in row) + "\n")
    except OSError as exc:
        raise SystemExit(f"cannot write {path}: {exc}") from exc


def _out_path(args, default_name: str) -> str:
    if args.out:
        return args.out
    base = os.environ.get("SWAPLAB_OUT_DIR", ".")
    return os.path.join(base, default_name)


@dataclass
class RunConfig:
    command: str
    seed: int = DEFAULT_SEED
    out: str | None = None
    params: dict = field(default_factory=dict)


BOUNDS_HEADER = ["p", "F", "f_max", "f_min_analytic", "f_min_sdp",
                 "delta_star", "bd_lower", "bd_upper", "f_werner"]


def cmd_bounds(args) -> int:
    if args.fix_f is not None:
        if args.p_steps < 1:
            raise SystemExit("usage error: --p-steps must be at least 1")
        rows_data = bounds.sweep_fixed_f(args.fix_f, args.p_steps)
        header = list(BOUNDS_HEADER)
    elif args.fix_p is not None:
        if args.f_steps < 1:
            raise SystemExit("usage error: --f-steps must be at least 1")
        rows_data = bounds.sweep_fixed_p(args.fix_p, args.f_min, args.f_max, args.f_steps)
        header = BOUNDS_HEADER + ["psi_witness"]
    else:
        raise SystemExit("usage error: pass --fix-f or --fix-p")
    for row in rows_data:
        if not row.check_ordering():
            raise SystemExit(f"bound ordering violated at p={row.p}, F={row.F}")
    out = _out_path(args, "bounds.csv")
    table = []
    for r in rows_data:
        rec = [r.p, r.F, r.f_max, r.f_min_analytic, r.f_min_sdp,
               r.delta_star, r.bd_lower, r.bd_upper, r.f_werner]
        if len(header) > len(BOUNDS_HEADER):
            rec.append(r.psi_witness)
        table.append(rec)
    _write_csv(out, header, table)
    print(f"wrote {len(table)} rows to {out}")
    return 0


def cmd_qkd(args) -> int:
    link = states.parse_state(json.loads(args.link))
    if args.n_min < 2 or args.n_max < args.n_min:
        raise SystemExit("usage error: need 2 <= n-min <= n-max")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        rows.append([
            n,
            qkd.chain_skf(link, n, "postselected"),
            qkd.chain_skf(link, n, "bd_approx"),
            qkd.chain_skf(link, n, "werner_approx"),
        ])
    out = _out_path(args, "qkd.csv")
    _write_csv(out, ["n", "skf_postselected", "skf_bd", "skf_werner"], rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _swap_report(rho1, rho2) -> dict:
    outs = swap.all_swap_outcomes(rho1, rho2)
    avg = swap.nonpostselected_swap(rho1, rho2)
    avg_bd = states.bd_twirl(avg)
    return {
        "outcomes": [
            {
                "label": o.label.name,
                "probability": o.probability,
                "fidelity": o.fidelity,
            }
            for o in outs
        ],
        "probability_sum": float(sum(o.probability for o in outs)),
        "average_bell_diagonal": [float(v) for v in avg_bd.values],
        "average_fidelity": avg_bd.fidelity,
    }


def cmd_swap(args) -> int:
    rho1 = states.parse_state(json.loads(args.state1))
    rho2 = states.parse_state(json.loads(args.state2))
    report = _swap_report(rho1, rho2)
    # bound checks from the best decompositions of the inputs
    p1, p2 = states.max_p(rho1), states.max_p(rho2)
    f1 = rho1.fidelity(bell_vector(0, 0))
    f2 = rho2.fidelity(bell_vector(0, 0))
    ceiling = 1 - p1 * (1 - f2) - p2 * (1 - f1)
    report["bound_checks"] = {
        "p_star": [p1, p2],
        "fidelity": [f1, f2],
        "ceiling": ceiling,
        "all_outcomes_below_ceiling": all(
            o["fidelity"] is None or o["fidelity"] <= ceiling + 1e-9
            for o in report["outcomes"]),
    }
    print(json.dumps(report, indent=2))
    return 0


def _parse_protocol(spec: str, n: int) -> chain.SwapAndCorrectProtocol:
    if spec in ("sequential", "correct_at_end"):
        return chain.builtin_protocol(spec, n)
    data = json.loads(spec)
    rules = tuple(
        chain.CorrectionRule(PauliLabel.from_name(r.get("const", "I")),
                             frozenset(r.get("syndrome_indices", [])))
        for r in data["corrections"]
    )
    order = tuple(data.get("order", range(1, n)))
    return chain.SwapAndCorrectProtocol(n, order, rules)


def cmd_chain(args) -> int:
    descriptors = json.loads(args.links)
    links = [states.parse_state(d) for d in descriptors]
    n = len(links)
    protocol = _parse_protocol(args.protocol, n)
    report_v = chain.validate_protocol(protocol)
    if not report_v.valid:
        print(json.dumps({
            "error": "invalid protocol",
            "physical": report_v.physical,
            "failing_syndromes": [
                "".join(lab.name for lab in syn)
                for syn in report_v.failing_syndromes[:16]
            ],
        }, indent=2))
        return 1
    merged: dict = {}
    for syn in chain._all_syndromes(n):
        state, prob = chain.run_chain_postselected(links, protocol, syn)
        if state is None:
            continue
        key = np.round(state.matrix, 9).tobytes()
        slot = merged.setdefault(key, [state, 0.0, 0])
        slot[1] += prob
        slot[2] += 1
    fidelities = [float(s.fidelity(bell_vector(0, 0))) for s, _, _ in merged.values()]
    probs = [p for _, p, _ in merged.values()]
    avg = chain.run_chain_nonpostselected(links, protocol)
    lam = states.bd_twirl(avg)
    f_links = [float(l.fidelity(bell_vector(0, 0))) for l in links]
    lo, hi = chain.chain_fidelity_bounds(f_links)
    out = {
        "n_links": n,
        "merged_outcomes": [
            {"probability": rec[1], "fidelity": float(rec[0].fidelity(bell_vector(0, 0))),
             "syndrome_count": rec[2]}
            for rec in merged.values()
        ],
        "probability_sum": float(sum(probs)),
        "average_bell_diagonal": [float(v) for v in lam.values],
        "average_fidelity": lam.fidelity,
        "fidelity_bounds": {"lower": lo, "upper": hi,
                            "inside": lo - 1e-9 <= lam.fidelity <= hi + 1e-9},
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_selftest(args) -> int:
    ok = selftest.run_all(seed=args.seed, full=args.full)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="swaplab",
        description="entanglement-swapping statistics, twirled-approximation "
                    "bounds, and QKD rates for repeater chains")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"RNG seed (default {DEFAULT_SEED})")
    sub = parser.add_subparsers(dest="command", required=True)

    pb = sub.add_parser("bounds", help="bound sweeps over (p, F) grids")
    pb.add_argument("--fix-f", type=float, default=None)
    pb.add_argument("--p-steps", type=int, default=100)
    pb.add_argument("--fix-p", type=float, default=None)
    pb.add_argument("--f-min", type=float, default=0.5)
    pb.add_argument("--f-max", type=float, default=1.0)
    pb.add_argument("--f-steps", type=int, default=100)
    pb.add_argument("--out", default=None)
    pb.set_defaults(func=cmd_bounds)

    pq = sub.add_parser("qkd", help="secret-key fraction vs chain length")
    pq.add_argument("--link", required=True, help='JSON state descriptor')
    pq.add_argument("--n-min", type=int, default=2)
    pq.add_argument("--n-max", type=int, default=14)
    pq.add_argument("--out", default=None)
    pq.set_defaults(func=cmd_qkd)

    ps = sub.add_parser("swap", help="all four outcomes of one swap")
    ps.add_argument("--state1", required=True)
    ps.add_argument("--state2", required=True)
    ps.set_defaults(func=cmd_swap)

    pc = sub.add_parser("chain", help="syndrome-resolved chain report")
    pc.add_argument("--links", required=True, help="JSON array of descriptors")
    pc.add_argument("--protocol", default="correct_at_end")
    pc.set_defaults(func=cmd_chain)

    pt = sub.add_parser("selftest", help="run the invariant suites")
    pt.add_argument("--full", action="store_true",
                    help="spec-sized suites (several minutes)")
    pt.set_defaults(func=cmd_selftest)

    args = parser.parse_args(argv)
    t0 = time.time()
    code = args.func(args)
    if args.command != "swap":
        print(f"done in {time.time() - t0:.1f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
