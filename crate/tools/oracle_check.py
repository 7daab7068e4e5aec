#!/usr/bin/env python3
"""Independent cross-check for serialized problem IRs.

Reads a ProblemIR JSON (see opt-ir's text serialization), builds the same
program with cvxpy, and prints the optimal objective. Used once per recorded
fixture; the values are frozen into the Rust tests next to a pointer here.

Usage: python3 tools/oracle_check.py path/to/ir.json
"""

import json
import math
import sys

import cvxpy as cp


def bound(v):
    if isinstance(v, str):
        return math.inf if v in ("inf", "+inf") else -math.inf
    return v


def main(path):
    ir = json.load(open(path))
    n = len(ir["vars"])
    x = cp.Variable(n)
    cons = []
    for v in ir["vars"]:
        lo, hi = bound(v["lower"]), bound(v["upper"])
        if math.isfinite(lo):
            cons.append(x[v["id"]] >= lo)
        if math.isfinite(hi):
            cons.append(x[v["id"]] <= hi)
        if v["kind"] == "binary":
            raise SystemExit("binary variables need a MIP back end; fix them first")
    if ir.get("sos2"):
        raise SystemExit("SOS2 sets need fixing before the convex cross-check")

    def lin(e):
        acc = e.get("constant", 0.0)
        for vid, coef in e["terms"]:
            acc = acc + coef * x[vid]
        return acc

    for row in ir["lin"]:
        body = lin(row["expr"])
        if row["sense"] == "le":
            cons.append(body <= row["rhs"])
        elif row["sense"] == "ge":
            cons.append(body >= row["rhs"])
        else:
            cons.append(body == row["rhs"])
    for cone in ir["cones"]:
        u = lin(cone["u"])
        v = lin(cone["v"])
        w = cp.hstack([2 * x[vid] for vid in cone["x_terms"]] + [u - v])
        cons.append(cp.SOC(u + v, w))
    obj = lin(ir["obj_lin"])
    for q in ir["obj_quad"]:
        if q["var_a"] != q["var_b"]:
            raise SystemExit("cross quadratic term")
        obj = obj + q["coefficient"] * cp.square(x[q["var_a"]])
    prob = cp.Problem(cp.Minimize(obj), cons)
    prob.solve(solver=cp.CLARABEL)
    print(f"{path}: status={prob.status} objective={prob.value:.10f}")


if __name__ == "__main__":
    for p in sys.argv[1:]:
        main(p)
