#!/usr/bin/env python3
"""Parent-measurement SDP oracle for the robustness of incompatibility.

min t  s.t.  G_l >= 0,  sum_l G_l = t I,  sum_{l: l(x)=a} G_l >= M_{a|x}

with one parent effect per deterministic post-processing l: settings ->
outcomes. Prints the value for the noisy X/Z qubit pair at a few
visibilities and for seeded random qubit pairs.
"""
import itertools

import cvxpy as cp
import numpy as np


def parent_value(effects):
    nx = len(effects)
    na = len(effects[0])
    d = effects[0][0].shape[0]
    t = cp.Variable()
    parents = list(itertools.product(range(na), repeat=nx))
    g = [cp.Variable((d, d), hermitian=True) for _ in parents]
    cons = [gv >> 0 for gv in g]
    cons.append(cp.sum(g) == t * np.eye(d))
    for x in range(nx):
        for a in range(na):
            marg = cp.sum([g[i] for i, lam in enumerate(parents) if lam[x] == a])
            cons.append(marg >> effects[x][a])
    prob = cp.Problem(cp.Minimize(t), cons)
    prob.solve(solver=cp.CLARABEL)
    return t.value


def noisy_xz(eta):
    plus = np.array([[0.5, 0.5], [0.5, 0.5]])
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    zero = np.diag([1.0, 0.0])
    one = np.diag([0.0, 1.0])
    half = np.eye(2) / 2
    return [[eta * plus + (1 - eta) * half, eta * minus + (1 - eta) * half],
            [eta * zero + (1 - eta) * half, eta * one + (1 - eta) * half]]


def random_pair(rng, d=2, na=2):
    effects = []
    for _ in range(2):
        raw = []
        for _ in range(na):
            gin = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            raw.append(gin @ gin.conj().T)
        total = sum(raw)
        w, v = np.linalg.eigh(total)
        fix = v @ np.diag(w ** -0.5) @ v.conj().T
        effects.append([fix @ r @ fix for r in raw])
    return effects


def main():
    for eta in (1.0, 0.9, 1 / np.sqrt(2), 0.65):
        print(f"xz eta={eta:.6f}: {parent_value(noisy_xz(eta)):.8f}")
    rng = np.random.default_rng(20260815)
    for k in range(3):
        print(f"random pair {k}: {parent_value(random_pair(rng)):.8f}")


if __name__ == "__main__":
    main()
