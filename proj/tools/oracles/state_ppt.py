#!/usr/bin/env python3
"""State-level entanglement measures against PPT states.

Computes, for a bipartite state rho on C^da (x) C^db:
  rmax: min t  s.t. rho <= t*sigma, sigma a PPT state
  rs:   same with (t*sigma - rho)/(t-1) also PPT
  rmin: 1 / max <proj(rho), sigma> over PPT states sigma
Prints a table for maximally entangled states and a few seeded random
states, used to pin expected values in the C++ tests.
"""

import numpy as np
import cvxpy as cp


def ptranspose(x, da, db):
    return (
        x.reshape((da, db, da, db)).transpose((0, 3, 2, 1)).reshape((da * db, da * db))
    )


def pt_expr(g, da, db):
    d = da * db
    rows = []
    for i in range(da):
        for j in range(db):
            row = []
            for k in range(da):
                for l in range(db):
                    row.append(g[i * db + l, k * db + j])
            rows.append(cp.hstack(row))
    return cp.reshape(cp.vstack(rows), (d, d), order="C")


def solve(obj, cons):
    prob = cp.Problem(obj, cons)
    prob.solve(solver=cp.CLARABEL)
    assert prob.status == "optimal", prob.status
    return prob.value


def rmax(rho, da, db):
    g = cp.Variable(rho.shape, hermitian=True)
    cons = [g - rho >> 0, pt_expr(g, da, db) >> 0]
    return solve(cp.Minimize(cp.real(cp.trace(g))), cons)


def rs(rho, da, db):
    g = cp.Variable(rho.shape, hermitian=True)
    cons = [g - rho >> 0, pt_expr(g, da, db) >> 0, pt_expr(g - rho, da, db) >> 0]
    return solve(cp.Minimize(cp.real(cp.trace(g))), cons)


def rmin(rho, da, db):
    w, v = np.linalg.eigh(rho)
    proj = sum(
        np.outer(v[:, i], v[:, i].conj()) for i in range(len(w)) if w[i] > 1e-9
    )
    g = cp.Variable(rho.shape, hermitian=True)
    cons = [g >> 0, pt_expr(g, da, db) >> 0, cp.real(cp.trace(g)) == 1]
    val = solve(cp.Maximize(cp.real(cp.trace(proj @ g))), cons)
    return 1.0 / val


def max_entangled(d):
    v = np.zeros(d * d)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return np.outer(v, v)


def random_state(rng, d, rank):
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def main():
    print(f"{'state':>16} {'rmax':>12} {'rs':>12} {'rmin':>12}")
    for d in (2, 3):
        rho = max_entangled(d)
        print(
            f"{'phi_' + str(d):>16} {rmax(rho, d, d):12.8f} "
            f"{rs(rho, d, d):12.8f} {rmin(rho, d, d):12.8f}"
        )
    rng = np.random.default_rng(20260815)
    for k in range(3):
        rho = random_state(rng, 4, 2)
        print(
            f"{'rand4_rank2_' + str(k):>16} {rmax(rho, 2, 2):12.8f} "
            f"{rs(rho, 2, 2):12.8f} {rmin(rho, 2, 2):12.8f}"
        )
    # A pure non-maximally entangled state: sqrt(0.8)|00> + sqrt(0.2)|11>.
    v = np.zeros(4)
    v[0], v[3] = np.sqrt(0.8), np.sqrt(0.2)
    rho = np.outer(v, v)
    print(
        f"{'tilted_pure':>16} {rmax(rho, 2, 2):12.8f} "
        f"{rs(rho, 2, 2):12.8f} {rmin(rho, 2, 2):12.8f}"
    )


if __name__ == "__main__":
    main()
