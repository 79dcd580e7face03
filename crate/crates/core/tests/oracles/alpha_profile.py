"""Shock-capturing quadrature weights for a p = 5 element holding a centred step.

One 1D cell (0, h) with h = 0.1, equispaced nodes, nodal data of a unit step at the
cell centre (0, 0, 0, 1, 1, 1). Dissipation integrand f_q = |u'(x_q)|^2 (gamma = 0,
DG form), 6-point Gauss rule. alpha~_q = |u|_{x_q} / |u|_e and
alpha_q = alpha~_q * sum(w f) / sum(w alpha~ f).

Writes alpha_profile.json next to this script.
"""

import json
import os

import numpy as np
import sympy as sp

x = sp.symbols("x")
P = 5
H = sp.Rational(1, 10)


def main():
    nodes = [H * sp.Rational(a, P) for a in range(P + 1)]
    values = [0, 0, 0, 1, 1, 1]
    u = sp.expand(sp.interpolate(list(zip(nodes, values)), x))
    gx, gw = np.polynomial.legendre.leggauss(P + 1)
    pts = [sp.Float(0.5 * (t + 1.0), 30) * H for t in gx]
    wts = [sp.Float(0.5 * w, 30) * H for w in gw]

    elem = sp.sqrt(sum(H ** (2 * k - 1) * sp.integrate(sp.diff(u, x, k) ** 2, (x, 0, H)) for k in range(1, P + 1)))
    elem = sp.N(elem, 30)

    def point(at):
        return sp.sqrt(sum((H**k * sp.diff(u, x, k).subs(x, at)) ** 2 for k in range(1, P + 1)))

    prelim = [sp.N(point(q) / elem, 30) for q in pts]
    f = [sp.N(sp.diff(u, x).subs(x, q) ** 2, 30) for q in pts]
    total = sum(w * fq for w, fq in zip(wts, f))
    scaled = sum(w * a * fq for w, a, fq in zip(wts, prelim, f))
    alpha = [float(a * total / scaled) for a in prelim]
    out = {
        "degree": P,
        "h": float(H),
        "nodal": values,
        "quad_points": [float(q) for q in pts],
        "alpha_prelim": [float(a) for a in prelim],
        "alpha": alpha,
    }
    print("alpha", alpha)
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "alpha_profile.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1)


if __name__ == "__main__":
    main()
