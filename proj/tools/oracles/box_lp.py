#!/usr/bin/env python3
"""LP oracle for CHSH-box monotones over the 16-vertex local polytope.

Computes, for isotropic boxes B_p = (1-p) PR + p white:
  r_max  min t s.t. B_p + (t-1) M in t * Local, M no-signalling
  r_s    same with M local
  r_min  max over tests: support measure via the zero-error
         hypothesis-testing LP (min lambda s.t. 0 <= q <= pi, <q,B> >= 1,
         <q,V> <= lambda for every local vertex V)

Run: python3 box_lp.py [p ...]
"""
import itertools
import sys

import cvxpy as cp
import numpy as np

NX = NY = NA = NB = 2
SIZE = NX * NY * NA * NB


def idx(x, y, a, b):
    return ((x * NY + y) * NA + a) * NB + b


def pr_table():
    t = np.zeros(SIZE)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        if (a ^ b) == (x & y):
            t[idx(x, y, a, b)] = 0.5
    return t


def white_table():
    return np.full(SIZE, 0.25)


def local_vertices():
    verts = []
    # Deterministic strategies: a = f(x), b = g(y).
    for fa in itertools.product(range(NA), repeat=NX):
        for gb in itertools.product(range(NB), repeat=NY):
            t = np.zeros(SIZE)
            for x in range(NX):
                for y in range(NY):
                    t[idx(x, y, fa[x], gb[y])] = 1.0
            verts.append(t)
    return np.array(verts)


def ns_constraints(q):
    cons = []
    # Normalization per setting pair and no-signalling marginals.
    for x in range(NX):
        for y in range(NY):
            cons.append(cp.sum([q[idx(x, y, a, b)] for a in range(NA) for b in range(NB)]) == 1)
    for x in range(NX):
        for a in range(NA):
            m0 = cp.sum([q[idx(x, 0, a, b)] for b in range(NB)])
            for y in range(1, NY):
                cons.append(cp.sum([q[idx(x, y, a, b)] for b in range(NB)]) == m0)
    for y in range(NY):
        for b in range(NB):
            m0 = cp.sum([q[idx(0, y, a, b)] for a in range(NA)])
            for x in range(1, NX):
                cons.append(cp.sum([q[idx(x, y, a, b)] for a in range(NA)]) == m0)
    return cons


VERTS = local_vertices()


def robustness(box, ns_mixing):
    t = cp.Variable()
    w = cp.Variable(len(VERTS), nonneg=True)  # t * local combination
    if ns_mixing:
        m = cp.Variable(SIZE, nonneg=True)    # (t-1) * mixing box
        cons = ns_constraints_scaled(m, t - 1)
    else:
        wm = cp.Variable(len(VERTS), nonneg=True)
        m = VERTS.T @ wm
        cons = [cp.sum(wm) == t - 1]
    cons += [cp.sum(w) == t, box + m == VERTS.T @ w]
    prob = cp.Problem(cp.Minimize(t), cons)
    prob.solve(solver=cp.CLARABEL)
    return t.value


def ns_constraints_scaled(q, scale):
    cons = []
    for x in range(NX):
        for y in range(NY):
            cons.append(cp.sum([q[idx(x, y, a, b)] for a in range(NA) for b in range(NB)]) == scale)
    for x in range(NX):
        for a in range(NA):
            m0 = cp.sum([q[idx(x, 0, a, b)] for b in range(NB)])
            for y in range(1, NY):
                cons.append(cp.sum([q[idx(x, y, a, b)] for b in range(NB)]) == m0)
    for y in range(NY):
        for b in range(NB):
            m0 = cp.sum([q[idx(0, y, a, b)] for a in range(NA)])
            for x in range(1, NX):
                cons.append(cp.sum([q[idx(x, y, a, b)] for a in range(NA)]) == m0)
    return cons


def support_measure(box):
    lam = cp.Variable()
    pi = cp.Variable(NX * NY, nonneg=True)
    q = cp.Variable(SIZE, nonneg=True)
    cons = [cp.sum(pi) == 1]
    for x in range(NX):
        for y in range(NY):
            s = x * NY + y
            for a in range(NA):
                for b in range(NB):
                    cons.append(q[idx(x, y, a, b)] <= pi[s])
    cons.append(q @ box >= 1.0)
    for v in VERTS:
        cons.append(q @ v <= lam)
    prob = cp.Problem(cp.Minimize(lam), cons)
    prob.solve(solver=cp.CLARABEL)
    return 1.0 / lam.value


def g_measure(box, m):
    # max <q, box> over sub-normalized tests 0 <= q <= pi (per setting),
    # with <q, V> <= 1/m on every local vertex.
    pi = cp.Variable(NX * NY, nonneg=True)
    q = cp.Variable(SIZE, nonneg=True)
    cons = [cp.sum(pi) == 1]
    for x in range(NX):
        for y in range(NY):
            s = x * NY + y
            for a in range(NA):
                for b in range(NB):
                    cons.append(q[idx(x, y, a, b)] <= pi[s])
    for v in VERTS:
        cons.append(q @ v <= 1.0 / m)
    prob = cp.Problem(cp.Maximize(q @ box), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def main():
    grid = [float(v) for v in sys.argv[1:]] or [0.0, 1 - np.sqrt(2) / 2, 0.3, 0.5, 1.0]
    pr, white = pr_table(), white_table()
    print(f"{'p':>10} {'r_max':>12} {'r_s':>12} {'r_min':>12}")
    for p in grid:
        box = (1 - p) * pr + p * white
        rmax = robustness(box, ns_mixing=True)
        rs = robustness(box, ns_mixing=False)
        rmin = support_measure(box)
        print(f"{p:10.6f} {rmax:12.8f} {rs:12.8f} {rmin:12.8f}")
    # G measure against the PR target's two scales: its support measure 4/3
    # (upper bound on conversion fidelity) and its standard robustness 3/2
    # (lower bound / construction scale).
    print(f"\n{'p':>10} {'G(m=4/3)':>12} {'G(m=3/2)':>12}")
    for p in grid:
        box = (1 - p) * pr + p * white
        print(f"{p:10.6f} {g_measure(box, 4.0 / 3.0):12.8f} {g_measure(box, 1.5):12.8f}")


if __name__ == "__main__":
    main()
