#!/usr/bin/env python3
"""Regenerate the heat-equation convergence table: L1 errors against the
exact solution and observed rates for every scheme row, N = 12..972."""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from relaxrd import relax_core as rc
from relaxrd.cli import report_csv
from relaxrd.harness import convergence_study
from relaxrd.models import heat_problem
from relaxrd.reconstruct import ReconstructionKind

ROWS = [("eno2", 1), ("eno3", 2), ("eno4", 2), ("eno5", 3), ("eno6", 3),
        ("weno3", 2), ("weno5", 3)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/table1")
    ap.add_argument("--t-end", type=float, default=0.01)
    ap.add_argument("--m-list", type=int, nargs="+",
                    default=[12, 36, 108, 324, 972])
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    prob = heat_problem()
    reports = {}
    for spec, rk in ROWS:
        cfg = rc.SchemeConfig(ReconstructionKind.parse(spec), rc.tableau(rk))
        rep = convergence_study(prob, cfg, args.m_list, args.t_end)
        reports[(spec, rk)] = rep
        with open(os.path.join(args.out, f"report_{spec}_rk{rk}.csv"), "w") as f:
            f.write(report_csv(rep))

    header = "scheme      " + "".join(f"  N={m:<11d}" for m in args.m_list)
    print(header)
    for (spec, rk), rep in reports.items():
        cells = "".join(f"  {e:<13.4e}" for e in rep.column("error_l1"))
        print(f"{spec+',RK'+str(rk):<12s}{cells}")
    print("\nrates")
    for (spec, rk), rep in reports.items():
        cells = "".join("  " + ("-" if r is None else f"{r:<11.4f}")
                        for r in rep.column("rate_l1"))
        print(f"{spec+',RK'+str(rk):<12s}{cells}")


if __name__ == "__main__":
    main()
