#!/usr/bin/env python3
"""Solve MPS files with HiGHS and write plain-text solutions.

usage: highs_solve.py [--time-limit S] [--gap G] [--threads N] [--seed K] MODEL.mps SOLUTION.txt [MODEL SOLUTION ...]
       highs_solve.py --version

Each solution file holds:
    status <optimal|feasible|infeasible|unbounded|timeout|error>
    wall_time <seconds>
    objective <value>
    mip_gap <value>
    columns <n>
    <name> <value>     (n lines, values printed with repr for exact round trip)
"""

import argparse
import sys
import time

import highspy

STATUS = {
    highspy.HighsModelStatus.kOptimal: "optimal",
    highspy.HighsModelStatus.kModelEmpty: "optimal",
    highspy.HighsModelStatus.kInfeasible: "infeasible",
    highspy.HighsModelStatus.kUnbounded: "unbounded",
    highspy.HighsModelStatus.kTimeLimit: "timeout",
    highspy.HighsModelStatus.kIterationLimit: "timeout",
    highspy.HighsModelStatus.kSolutionLimit: "timeout",
}


def configure(h, args, presolve=True):
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", args.threads)
    h.setOptionValue("random_seed", args.seed)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.setOptionValue("presolve", "on" if presolve else "off")
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("dual_feasibility_tolerance", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)


def solve_one(model_path, args):
    h = highspy.Highs()
    configure(h, args)
    if h.readModel(model_path) == highspy.HighsStatus.kError:
        return "error", None, None, [], []
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kUnboundedOrInfeasible:
        h.clearSolver()
        configure(h, args, presolve=False)
        h.run()
        status = h.getModelStatus()
        if status == highspy.HighsModelStatus.kUnboundedOrInfeasible:
            status = highspy.HighsModelStatus.kInfeasible
    label = STATUS.get(status, "error")
    info = h.getInfo()
    has_primal = info.primal_solution_status == 2
    if label == "timeout" and has_primal:
        label = "feasible"
    if label not in ("optimal", "feasible"):
        return label, None, None, [], []
    lp = h.getLp()
    values = list(h.getSolution().col_value)
    objective = info.objective_function_value
    gap = info.mip_gap if lp.integrality_ else 0.0
    if lp.integrality_ and label == "optimal":
        values, objective = polish(lp, values, args, values, objective)
    return label, objective, gap, list(lp.col_names_), values


def polish(lp, values, args, fallback, objective):
    """Re-solve the LP with integers fixed at their rounded values."""
    h = highspy.Highs()
    configure(h, args, presolve=False)
    h.passModel(lp)
    for j, kind in enumerate(lp.integrality_):
        if kind != highspy.HighsVarType.kContinuous:
            v = float(round(values[j]))
            h.changeColBounds(j, v, v)
            h.changeColIntegrality(j, highspy.HighsVarType.kContinuous)
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return fallback, objective
    return list(h.getSolution().col_value), h.getInfo().objective_function_value


def main():
    if "--version" in sys.argv[1:]:
        print("HiGHS", highspy.Highs().version())
        return 0
    parser = argparse.ArgumentParser()
    parser.add_argument("--time-limit", type=float, default=float("inf"))
    parser.add_argument("--gap", type=float, default=1e-9)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("files", nargs="+")
    args = parser.parse_args()
    if len(args.files) % 2:
        parser.error("expected MODEL SOLUTION pairs")
    for model_path, solution_path in zip(args.files[0::2], args.files[1::2]):
        start = time.perf_counter()
        label, objective, gap, names, values = solve_one(model_path, args)
        elapsed = time.perf_counter() - start
        with open(solution_path, "w") as out:
            out.write(f"status {label}\n")
            out.write(f"wall_time {elapsed!r}\n")
            if objective is not None:
                out.write(f"objective {objective!r}\n")
                out.write(f"mip_gap {gap!r}\n")
            out.write(f"columns {len(values)}\n")
            for name, value in zip(names, values):
                out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
