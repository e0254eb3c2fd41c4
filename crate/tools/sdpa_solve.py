#!/usr/bin/env python3
"""Solve a sparse SDPA problem in dual form with cvxpy.

    max F0 . Y  s.t.  Fk . Y = c_k (k = 1..m),  Y >= 0 (block diagonal)

Usage: sdpa_solve.py INPUT.dat-s OUTPUT.sol [--solver CLARABEL]

The output lists `objective <value>` followed by `<block> <row> <col> <value>`
lines (1-based, row <= col) for every block of Y.
"""

import argparse
import sys

import cvxpy as cp
import numpy as np


def tokens(text):
    for line in text.splitlines():
        line = line.split("*")[0].split('"')[0].strip()
        if line:
            yield from line.replace(",", " ").replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ").split()


def read_sdpa(path):
    with open(path) as fh:
        tok = tokens(fh.read())
    m = int(next(tok))
    nblocks = int(next(tok))
    sizes = [int(next(tok)) for _ in range(nblocks)]
    c = np.array([float(next(tok)) for _ in range(m)])
    entries = []
    for t in tok:
        k, b, i, j = int(t), int(next(tok)), int(next(tok)), int(next(tok))
        v = float(next(tok))
        entries.append((k, b - 1, i - 1, j - 1, v))
    return m, sizes, c, entries


def inner(var, size, items):
    """F . Y for a sparse symmetric F given by its upper-triangle items."""
    terms = []
    for i, j, v in items:
        if size < 0:
            if i != j:
                raise ValueError("off-diagonal entry in a diagonal block")
            terms.append(v * var[i])
        elif i == j:
            terms.append(v * var[i, j])
        else:
            terms.append(2 * v * var[min(i, j), max(i, j)])
    return cp.sum(cp.hstack(terms)) if terms else 0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()

    m, sizes, c, entries = read_sdpa(args.input)
    Y = []
    cons = []
    for d in sizes:
        if d > 0:
            var = cp.Variable((d, d), symmetric=True)
            cons.append(var >> 0)
        else:
            var = cp.Variable(-d, nonneg=True)
        Y.append(var)

    grouped = {}
    for k, b, i, j, v in entries:
        grouped.setdefault((k, b), []).append((i, j, v))

    def mat_inner(k):
        total = 0
        for b, d in enumerate(sizes):
            items = grouped.get((k, b))
            if items:
                total = total + inner(Y[b], d, items)
        return total

    objective = mat_inner(0)
    for k in range(1, m + 1):
        cons.append(mat_inner(k) == c[k - 1])
    prob = cp.Problem(cp.Maximize(objective), cons)
    opts = {}
    if args.solver == "CLARABEL":
        opts = dict(tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12, max_iter=500)
    prob.solve(solver=args.solver, **opts)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        print(f"solver status {prob.status}", file=sys.stderr)
        return 1

    with open(args.output, "w") as out:
        out.write(f"* status {prob.status}\n")
        out.write(f"objective {float(prob.value)!r}\n")
        for b, d in enumerate(sizes):
            val = np.asarray(Y[b].value)
            if d > 0:
                for i in range(d):
                    for j in range(i, d):
                        out.write(f"{b + 1} {i + 1} {j + 1} {float(val[i, j])!r}\n")
            else:
                for i in range(-d):
                    out.write(f"{b + 1} {i + 1} {i + 1} {float(val[i])!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
