"""Cell-vertex HWENO reconstruction of 1D step data, evaluated symbolically.

Configuration: 6 cells on (0, 1), non-periodic, p = 2, equispaced nodes, nodal
interpolation of a unit step at x = 0.5 (on a vertex) and at x = 0.55 (inside
cell 3). Parameters eps = 1e-6, r = 2, q_beta = 2, q_sensor = 1, gamma_vert = 1e-3.

Polynomials are exact rationals; weights are evaluated with 50-digit floats.
Writes cv_step_1d.json next to this script.
"""

import json
import os

import sympy as sp

x = sp.symbols("x")
N_CELLS = 6
P = 2
EPS = sp.Float("1e-6", 50)
R = 2
Q_BETA = 2
GAMMA_VERT = sp.Rational(1, 1000)
H = sp.Rational(1, N_CELLS)


def cell_nodes(e):
    return [e * H + sp.Rational(a, P) * H for a in range(P + 1)]


def interpolant(e, values):
    return sp.expand(sp.interpolate(list(zip(cell_nodes(e), values)), x))


def point_norm(poly, at):
    s = sum((H**k * sp.diff(poly, x, k).subs(x, at)) ** 2 for k in range(1, P + 1))
    return sp.sqrt(s)


def elem_norm(poly, e):
    a, b = e * H, (e + 1) * H
    s = sum(H ** (2 * k - 1) * sp.integrate(sp.diff(poly, x, k) ** 2, (x, a, b)) for k in range(1, P + 1))
    return sp.sqrt(s)


def jiang_shu(betas, linear):
    raw = [sp.Float(g, 50) / (EPS + b) ** R for b, g in zip(betas, linear)]
    tot = sum(raw)
    return [w / tot for w in raw]


def run(step_at):
    def u0(t):
        return 0 if t < step_at else 1

    polys = [interpolant(e, [u0(t) for t in cell_nodes(e)]) for e in range(N_CELLS)]
    # vertex candidates: WENO average of the patch polynomials (full expansions)
    vertex_poly = []
    for v in range(N_CELLS + 1):
        xv = v * H
        patch = [e for e in (v - 1, v) if 0 <= e < N_CELLS]
        betas = [sp.N(point_norm(polys[e], xv), 50) ** Q_BETA for e in patch]
        w = jiang_shu(betas, [1] * len(patch))
        vertex_poly.append(sum(wi * polys[e] for wi, e in zip(w, patch)))
    recon, gammas = [], []
    for e in range(N_CELLS):
        cands = [polys[e], vertex_poly[e], vertex_poly[e + 1]]
        lin = [1 - 2 * GAMMA_VERT, GAMMA_VERT, GAMMA_VERT]
        betas = [sp.N(elem_norm(c, e), 50) ** Q_BETA for c in cands]
        w = jiang_shu(betas, lin)
        star = sp.expand(sum(wi * c for wi, c in zip(w, cands)))
        nodal = [sp.N(star.subs(x, t), 30) for t in cell_nodes(e)]
        recon.append([float(v) for v in nodal])
        norm = sp.N(elem_norm(polys[e], e), 50)
        dev = sp.N(elem_norm(sp.expand(polys[e] - star), e), 50)
        avg = sp.integrate(polys[e], (x, e * H, (e + 1) * H)) / H
        if norm < sp.Float("1e-14") * abs(avg) or (norm == 0 and dev == 0):
            gammas.append(1.0)
        elif norm == 0:
            gammas.append(0.0)
        else:
            gammas.append(float(1 - min(1, dev / norm)))
    return recon, gammas


def main():
    out = {}
    for key, at in (("vertex_step", sp.Rational(1, 2)), ("cell_step", sp.Rational(11, 20))):
        recon, gammas = run(at)
        out[key] = {"step_at": float(at), "reconstruction": recon, "gamma": gammas}
        print(key, gammas)
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "cv_step_1d.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1)


if __name__ == "__main__":
    main()
