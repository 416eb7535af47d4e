"""Writes the radial-camera and four-bar (nine-point path synthesis) fixtures.
Neither runs in CI. Run from the fixtures directory."""
import itertools

import numpy as np
import sympy as sp

rng = np.random.default_rng(7331)


def cnormal(*shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def fmt(z):
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def sym_str(e):
    return str(sp.expand(e)).replace("**", "^")


def write(name, comment, unknowns, params, eqs, xval, pval, formulas):
    with open(f"{name}.sys", "w") as f:
        f.write(f"# {comment}\n")
        f.write("unknowns " + ", ".join(map(str, unknowns)) + ";\n")
        f.write("parameters " + ", ".join(map(str, params)) + ";\n")
        f.write("equations\n")
        for e in eqs:
            f.write("  " + sym_str(e) + ";\n")
    with open(f"{name}.seed", "w") as f:
        f.write("# generated by scripts/stretch_fixtures.py\n")
        f.write("x: " + ", ".join(fmt(v) for v in xval) + ";\n")
        f.write("p: " + ", ".join(fmt(v) for v in pval) + ";\n")
    for k, maps in enumerate(formulas, 1):
        with open(f"{name}.deck{k}", "w") as f:
            for var, expr in maps:
                f.write(f"{var} = {str(expr).replace('**', '^')};\n")


def check(eqs, unknowns, params, xval, pval, tol):
    f = sp.lambdify(list(unknowns) + list(params), eqs, "numpy")
    worst = max(abs(complex(v)) for v in f(*xval, *pval))
    assert worst < tol, worst
    return worst


def image(maps, unknowns, xval, params, pval):
    d = dict(maps)
    args = list(unknowns) + list(params)
    vals = list(xval) + list(pval)
    out = []
    for u, v in zip(unknowns, xval):
        out.append(complex(sp.lambdify(args, d[u], "numpy")(*vals)) if u in d else v)
    return out


# ---------------------------------------------------------------- radial camera
def radial():
    npts, ncam = 13, 4
    cx = sp.symbols("x2:5")
    cy = sp.symbols("y2:5")
    cz = sp.symbols("z2:5")
    w = sp.symbols("w2:5")
    t3 = sp.symbols("t31 t32")
    t4 = sp.symbols("t41 t42")
    al = [[sp.Symbol(f"a{i}_{j}") for j in range(1, ncam + 1)] for i in range(1, npts + 1)]
    Z = [sp.Symbol(f"Z{i}") for i in range(1, npts + 1)]
    L = [[sp.symbols(f"l{i}_{j}_1 l{i}_{j}_2") for j in range(1, ncam + 1)] for i in range(1, npts + 1)]

    def cay_num(x, y, z):
        return sp.Matrix([[1 + x**2 - y**2 - z**2, 2 * (x * y - z), 2 * (x * z + y)],
                          [2 * (x * y + z), 1 + y**2 - x**2 - z**2, 2 * (y * z - x)]])

    T = [sp.Matrix([0, 1]), sp.Matrix(t3), sp.Matrix(t4)]
    eqs = []
    for k in range(3):
        eqs.append(w[k] * (1 + cx[k]**2 + cy[k]**2 + cz[k]**2) - 1)
    for i in range(npts):
        Xi = sp.Matrix([al[i][0] * L[i][0][0], al[i][0] * L[i][0][1], Z[i]])
        for j in range(1, ncam):
            k = j - 1
            v = w[k] * cay_num(cx[k], cy[k], cz[k]) * Xi + T[k]
            for r in range(2):
                eqs.append(al[i][j] * L[i][j][r] - v[r])
    unknowns = list(cx) + list(cy) + list(cz) + list(t3) + list(t4) + list(w) + [a for row in al for a in row] + Z
    params = [l for row in L for pair in row for l in pair]
    assert len(eqs) == len(unknowns)

    # forward simulation
    cam = cnormal(3, 3) * 0.6
    tv = [np.array([0, 1]), cnormal(2), cnormal(2)]
    Xw = cnormal(npts, 3)
    xval_map, pval_map = {}, {}
    for k in range(3):
        xval_map[cx[k]], xval_map[cy[k]], xval_map[cz[k]] = cam[k]
        xval_map[w[k]] = 1 / (1 + cam[k] @ cam[k])
    xval_map[t3[0]], xval_map[t3[1]] = tv[1]
    xval_map[t4[0]], xval_map[t4[1]] = tv[2]
    for i in range(npts):
        a1 = cnormal(1)[0]
        xval_map[al[i][0]] = a1
        pval_map[L[i][0][0]], pval_map[L[i][0][1]] = Xw[i][:2] / a1
        xval_map[Z[i]] = Xw[i][2]
        for j in range(1, ncam):
            k = j - 1
            M = np.array(cay_num(*cam[k]).tolist(), dtype=complex) * xval_map[w[k]]
            v = M @ Xw[i] + tv[k]
            a = cnormal(1)[0]
            xval_map[al[i][j]] = a
            pval_map[L[i][j][0]], pval_map[L[i][j][1]] = v / a
    xval = [xval_map[u] for u in unknowns]
    pval = [pval_map[p] for p in params]
    check(eqs, unknowns, params, xval, pval, 1e-10)

    # deck generators
    def flip_all():
        m = [(v, -v) for v in cx + cy] + [(z, -z) for z in Z]
        return m

    def inversion(k):
        x, y, z = cx[k], cy[k], cz[k]
        m = [(x, y / z), (y, -x / z), (z, -1 / z), (w[k], z**2 * w[k])]
        m += [(al[i][k + 1], al[i][k + 1] / z**2) for i in range(npts)]
        return m

    # Inverting camera k composes its rotation with a half turn about the
    # optical axis; the world points and the other cameras flip to match.
    def inversion(k):
        x, y, z = cx[k], cy[k], cz[k]
        m = [(x, y / z), (y, -x / z), (z, -1 / z), (w[k], z**2 * w[k])]
        if k == 0:
            m += [(c, -c) for c in t3 + t4] + [(v, -v) for v in Z]
            m += [(al[i][j], -al[i][j]) for i in range(npts) for j in (0, 2, 3)]
        else:
            m += [(c, -c) for c in (t3 if k == 1 else t4)]
            m += [(al[i][k + 1], -al[i][k + 1]) for i in range(npts)]
        return m

    found = []
    for maps in (flip_all(), inversion(0), inversion(1), inversion(2)):
        img = image(maps, unknowns, xval, params, pval)
        check(eqs, unknowns, params, img, pval, 1e-8)
        found.append([(str(k), v) for k, v in maps])
    return unknowns, params, eqs, xval, pval, found


# ---------------------------------------------------------------- four-bar
def fourbar():
    x, xb, y, yb, a, ab, b, bb = sp.symbols("x xb y yb a ab b bb")
    P = sp.symbols("p1:9")
    Pb = sp.symbols("pb1:9")
    eqs = []
    for j in range(8):
        p, pb = P[j], Pb[j]
        cx = (x - a) * (xb - ab) - x * xb - (p - a) * (pb - ab)
        cy = (y - b) * (yb - bb) - y * yb - (p - b) * (pb - bb)
        m11, m12 = x * (pb - ab), xb * (p - a)
        m21, m22 = y * (pb - bb), yb * (p - b)
        D = m11 * m22 - m12 * m21
        D1 = cx * m22 - m12 * cy
        D2 = m11 * cy - m21 * cx
        eqs.append(D1 * D2 - D**2)
    unknowns = [x, xb, y, yb, a, ab, b, bb]
    params = list(P) + list(Pb)

    mech = cnormal(8)
    X, XB, Y, YB, A, AB, B, BB = mech
    pv, pbv = [], []
    for j in range(8):
        Tj = np.exp(1j * rng.uniform(0, 2 * np.pi)) * (1 + 0.3 * cnormal(1)[0])
        Tbj = 1 / Tj
        al_, be = X - A, Tj * Y - Tj * X + A - B
        ga, de = XB - AB, Tbj * YB - Tbj * XB + AB - BB
        ep = (Y - B) * (YB - BB)
        Q = np.roots([al_ * de, al_ * ga + be * de - ep, be * ga])[0]
        pv.append(Q * (X - A) - Tj * X + A)
        pbv.append((XB - AB) / Q - Tbj * XB + AB)
    xval, pval = list(mech), pv + pbv
    check(eqs, unknowns, params, xval, pval, 1e-8)

    swap = [("x", y), ("xb", yb), ("y", x), ("yb", xb), ("a", b), ("ab", bb), ("b", a), ("bb", ab)]
    rob = [("x", (x - a) * y / (x - y)), ("xb", (xb - ab) * yb / (xb - yb)),
           ("y", a - x), ("yb", ab - xb),
           ("a", (b * x - a * y) / (x - y)), ("ab", (bb * xb - ab * yb) / (xb - yb)), ("b", a), ("bb", ab)]
    for maps in (swap, rob):
        img = image([(sp.Symbol(k), v) for k, v in maps], unknowns, xval, params, pval)
        check(eqs, unknowns, params, img, pval, 1e-6)
    return unknowns, params, eqs, xval, pval, [swap, rob]


write("radial", "relative pose of four radial cameras, thirteen points", *radial())
write("fourbar", "nine-point path synthesis of a four-bar linkage in isotropic coordinates", *fourbar())
