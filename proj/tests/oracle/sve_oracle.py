#!/usr/bin/env python3
"""Independent numpy reference values for the Saint-Venant-Exner instance.

Roots come from numpy's companion-matrix eigenvalues, every other quantity
from the closed forms. Output is what tests/sve_test.cpp and the acceptance
suite freeze; rerun after changing the reference parameters.
"""
import json
import numpy as np

g, a, H, V, Cf = 9.81, 0.005, 1.0, 1.0, 0.01


def roots():
    c = [1.0, -2.0 * V, V * V - g * a * V * V - g * H, g * a * V**3]
    return np.sort(np.roots(c).real)


lam = roots()
l1, l2, l3 = lam
A = np.array([[V, 0, H], [0, 0, a * V * V], [g, g, V]])
A0 = np.array([[(4 * g * H + 2 * a * g * V * V) / (4 * H * H), -g / (2 * H), -V / (2 * H)],
               [-g / (2 * H), 3 * g / (2 * a * V * V), 0],
               [-V / (2 * H), 0, 1]])
L = np.array([[g / (l - V), g / l, 1.0] for l in lam])
Linv = np.linalg.inv(L)


def prod_others(l):
    return np.prod([l - o for o in lam if o != l])


X = [l * (l - 1.5 * V) / prod_others(l) for l in lam]
X11, X22, X33 = X


def pi(lj, k1):
    return (l1 - V) / (lj - V) * (g - k1 * (lj - V)) / (g - k1 * (l1 - V))


def chi2(k2):
    return l2 * (l3 - l1) * (l2 - V) / (l1 * (l3 - l2) * (l1 - V)) * (g + k2 * (l2 - V)) / (g + k2 * (l1 - V))


def chi3(k2):
    return l3 * (l1 - l2) * (l3 - V) / (l1 * (l3 - l2) * (l1 - V)) * (g + k2 * (l3 - V)) / (g + k2 * (l1 - V))


def lhs(k1, k2):
    p2, p3, c2, c3 = pi(l2, k1), pi(l3, k1), chi2(k2), chi3(k2)
    b2, b3 = max(X22 / X11, 1), max(X33 / X11, 1)
    e2, e3 = max(X11 / X22, np.exp(l2 - l1)), max(X11 / X33, np.exp(l3 - l1))
    al1 = abs(l1)
    return {
        "exact_pi_X": p2**2 * X22 / X11 * l2 / al1 + p3**2 * X33 / X11 * l3 / al1,
        "exact_chi_X": c2**2 * X11 / X22 * al1 / l2 + c3**2 * X11 / X33 * al1 / l3,
        "exact_pi_exp": p2**2 * l2 / al1 + p3**2 * l3 / al1,
        "exact_chi_exp": c2**2 * np.exp(l2 - l1) * al1 / l2 + c3**2 * np.exp(l3 - l1) * al1 / l3,
        "sufficient_pi": p2**2 * b2 * l2 / al1 + p3**2 * b3 * l3 / al1,
        "sufficient_chi": c2**2 * e2 * al1 / l2 + c3**2 * e3 * al1 / l3,
    }


out = {
    "lambda": list(lam),
    "S_b": Cf * V * V / (g * H),
    "X": X,
    "L0": L.tolist(),
    "L0_inv": Linv.tolist(),
    "det_A0": float(np.linalg.det(A0)),
    "det_product": g / (a * H * H * V**3) * float(np.prod(lam - 1.5 * V)),
    "K_1_1": [pi(l2, 1.0), pi(l3, 1.0), chi2(1.0), chi3(1.0)],
    "K_3_m3.1": [pi(l2, 3.0), pi(l3, 3.0), chi2(-3.1), chi3(-3.1)],
    "lhs_0_0": lhs(0.0, 0.0),
    "lhs_3_m3.1": lhs(3.0, -3.1),
    "beta_eta": [max(X22 / X11, 1), max(X33 / X11, 1),
                 max(X11 / X22, np.exp(l2 - l1)), max(X11 / X33, np.exp(l3 - l1))],
    "kappa_bounds": [np.exp(-l3), np.exp(l1)],
}
print(json.dumps(out, indent=1, default=float))
