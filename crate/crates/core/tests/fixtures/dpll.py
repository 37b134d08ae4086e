#!/usr/bin/env python3
"""Small DPLL solver used as an external SAT backend in tests.

Reads a DIMACS CNF file, prints competition-style output and exits with
10 (SAT) or 20 (UNSAT).
"""
import sys


def parse(path):
    n_vars, clauses, cur = 0, [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line[0] == "c":
                continue
            if line[0] == "p":
                n_vars = int(line.split()[2])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(cur)
                    cur = []
                else:
                    cur.append(lit)
    return n_vars, clauses


def solve(n_vars, clauses):
    assign = {}

    def propagate():
        while True:
            unit = None
            for c in clauses:
                free = []
                sat = False
                for l in c:
                    v = assign.get(abs(l))
                    if v is None:
                        free.append(l)
                    elif v == (l > 0):
                        sat = True
                        break
                if sat:
                    continue
                if not free:
                    return False
                if len(free) == 1:
                    unit = free[0]
                    break
            if unit is None:
                return True
            assign[abs(unit)] = unit > 0

    def rec():
        saved = dict(assign)
        if not propagate():
            assign.clear()
            assign.update(saved)
            return False
        free = [v for v in range(1, n_vars + 1) if v not in assign]
        if not free:
            return True
        v = free[0]
        for val in (True, False):
            assign[v] = val
            if rec():
                return True
            del assign[v]
        assign.clear()
        assign.update(saved)
        return False

    return assign if rec() else None


def main():
    sys.setrecursionlimit(100000)
    n_vars, clauses = parse(sys.argv[1])
    model = solve(n_vars, clauses)
    if model is None:
        print("s UNSATISFIABLE")
        sys.exit(20)
    print("s SATISFIABLE")
    lits = [v if model.get(v, False) else -v for v in range(1, n_vars + 1)]
    print("v " + " ".join(map(str, lits)) + " 0")
    sys.exit(10)


if __name__ == "__main__":
    main()
