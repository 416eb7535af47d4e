"""Writes the P3P and five-point fixtures: systems, seed pairs from forward
simulation, and the known deck formulas. Run from the fixtures directory."""
import numpy as np

rng = np.random.default_rng(20240611)


def cnormal(*shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def rotation():
    """Complex rotation from the Cayley transform of a skew matrix."""
    a, b, c = cnormal(3) * 0.5
    S = np.array([[0, -c, b], [c, 0, -a], [-b, a, 0]])
    I = np.eye(3)
    return np.linalg.solve(I - S, I + S)


def fmt(z):
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def write_seed(path, script, x, p):
    with open(path, "w") as f:
        f.write(f"# generated by scripts/{script}\n")
        f.write("x: " + ", ".join(fmt(v) for v in x) + ";\n")
        f.write("p: " + ", ".join(fmt(v) for v in p) + ";\n")


def write_system(path, comment, unknowns, params, eqs):
    with open(path, "w") as f:
        f.write(f"# {comment}\n")
        f.write("unknowns " + ", ".join(unknowns) + ";\n")
        f.write("parameters " + ", ".join(params) + ";\n")
        f.write("equations\n")
        for e in eqs:
            f.write("  " + e + ";\n")


def write_formulas(path, items):
    with open(path, "w") as f:
        for name, expr in items:
            f.write(f"{name} = {expr};\n")


R_names = [[f"r{i}{j}" for j in range(1, 4)] for i in range(1, 4)]
t_names = ["t1", "t2", "t3"]


def orthogonality():
    eqs = []
    for i in range(3):
        for j in range(i, 3):
            s = " + ".join(f"{R_names[k][i]}*{R_names[k][j]}" for k in range(3))
            eqs.append(s + (" - 1" if i == j else ""))
    return eqs


def orthogonality_residual(R):
    return [(R.T @ R)[i, j] - (1 if i == j else 0) for i in range(3) for j in range(i, 3)]


def flat(R):
    return [R[i, j] for i in range(3) for j in range(3)]


# ---------------------------------------------------------------- P3P
def p3p(homogeneous):
    k = 4 if homogeneous else 3
    ximg = [[f"x{i}{j}" for j in range(1, 3 + homogeneous)] for i in range(1, 4)]
    Xw = [[f"X{i}{j}" for j in range(1, k + 1)] for i in range(1, 4)]
    alpha = [f"alpha{i}" for i in range(1, 4)]
    n = ["n1", "n2", "n3"]
    unknowns = [v for row in R_names for v in row] + t_names + alpha + n
    params = [v for row in ximg for v in row] + [v for row in Xw for v in row]
    eqs = orthogonality()
    for i in range(3):
        for r in range(3):
            proj = " + ".join(f"{R_names[r][c]}*{Xw[i][c]}" for c in range(3))
            tt = f"{t_names[r]}*{Xw[i][3]}" if homogeneous else t_names[r]
            if r < 2 or homogeneous:
                eqs.append(f"{alpha[i]}*{ximg[i][r]} - ({proj} + {tt})")
            else:
                eqs.append(f"{alpha[i]} - ({proj} + {tt})")
        plane = " + ".join(f"{n[c]}*{Xw[i][c]}" for c in range(3))
        eqs.append(plane + (f" + {Xw[i][3]}" if homogeneous else " + 1"))

    R, t, nv = rotation(), cnormal(3), cnormal(3)
    Xs, xs, als = [], [], []
    for i in range(3):
        X = cnormal(3)
        if homogeneous:
            X = np.append(X, -nv @ X)
            v = R @ X[:3] + t * X[3]
            a = cnormal(1)[0]
            x = v / a
        else:
            X = -X / (nv @ X)
            v = R @ X + t
            a = v[2]
            x = v[:2] / a
        Xs.append(X), xs.append(x), als.append(a)
    xval = flat(R) + list(t) + als + list(nv)
    pval = [v for x in xs for v in x] + [v for X in Xs for v in X]

    # residual check
    res = orthogonality_residual(R)
    for i in range(3):
        lhs = als[i] * (xs[i] if homogeneous else np.append(xs[i], 1))
        rhs = R @ Xs[i][:3] + t * (Xs[i][3] if homogeneous else 1)
        res += list(lhs - rhs)
        res.append(nv @ Xs[i][:3] + (Xs[i][3] if homogeneous else 1))
    assert max(abs(np.array(res))) < 1e-10, max(abs(np.array(res)))
    assert len(eqs) == len(unknowns)

    # deck formulas
    nn = " + ".join(f"{c}^2" for c in n)
    formulas = []
    for i in range(3):
        for j in range(3):
            # (R (2 n n^T / |n|^2 - I))_{ij}
            s = " + ".join(f"{R_names[i][c]}*{n[c]}" for c in range(3))
            formulas.append((R_names[i][j], f"(2*({s})*{n[j]} - {R_names[i][j]}*({nn}))/({nn})"))
    for i in range(3):
        s = " + ".join(f"{R_names[i][c]}*{n[c]}" for c in range(3))
        formulas.append((t_names[i], f"(2*({s}) - {t_names[i]}*({nn}))/({nn})"))
    for a in alpha:
        formulas.append((a, f"-{a}"))
    for c in n:
        formulas.append((c, c))

    # image is a solution
    Q = 2 * np.outer(nv, nv) / (nv @ nv) - np.eye(3)
    R2, t2 = R @ Q, 2 * R @ nv / (nv @ nv) - t
    res = orthogonality_residual(R2)
    for i in range(3):
        lhs = -als[i] * (xs[i] if homogeneous else np.append(xs[i], 1))
        rhs = R2 @ Xs[i][:3] + t2 * (Xs[i][3] if homogeneous else 1)
        res += list(lhs - rhs)
    assert max(abs(np.array(res))) < 1e-9, max(abs(np.array(res)))
    return unknowns, params, eqs, xval, pval, formulas


# ---------------------------------------------------------------- five-point
def five_point(homogeneous):
    k = 3 if homogeneous else 2
    xn = [[f"x{i}{j}" for j in range(1, k + 1)] for i in range(1, 6)]
    yn = [[f"y{i}{j}" for j in range(1, k + 1)] for i in range(1, 6)]
    alpha = [f"alpha{i}" for i in range(1, 6)]
    beta = [f"beta{i}" for i in range(1, 6)]
    chart = ["c1", "c2", "c3"]
    unknowns = [v for row in R_names for v in row] + t_names + alpha + beta
    params = [v for row in xn for v in row] + [v for row in yn for v in row] + chart
    eqs = orthogonality()
    for i in range(5):
        for r in range(3):
            yr = yn[i][r] if (homogeneous or r < 2) else None
            xs = [xn[i][c] if (homogeneous or c < 2) else None for c in range(3)]
            terms = []
            for c in range(3):
                terms.append(f"{R_names[r][c]}*{alpha[i]}" + (f"*{xs[c]}" if xs[c] else ""))
            lhs = f"{beta[i]}*{yr}" if yr else beta[i]
            eqs.append(f"{lhs} - ({' + '.join(terms)} + {t_names[r]})")
    eqs.append(" + ".join(f"{c}*{t}" for c, t in zip(chart, t_names)) + " - 1")
    assert len(eqs) == len(unknowns)

    R, t = rotation(), cnormal(3)
    als = cnormal(5)
    xs, ys, bes = [], [], []
    for i in range(5):
        x = cnormal(3) if homogeneous else np.append(cnormal(2), 1)
        v = R @ (als[i] * x) + t
        if homogeneous:
            b = cnormal(1)[0]
            y = v / b
        else:
            b = v[2]
            y = v / b
        xs.append(x), ys.append(y), bes.append(b)
    c = cnormal(3)
    s = c @ t
    t, als, bes = t / s, als / s, np.array(bes) / s
    xval = flat(R) + list(t) + list(als) + list(bes)
    pval = [v for x in xs for v in x[:k]] + [v for y in ys for v in y[:k]] + list(c)

    res = orthogonality_residual(R)
    for i in range(5):
        res += list(bes[i] * ys[i] - (R @ (als[i] * xs[i]) + t))
    res.append(c @ t - 1)
    assert max(abs(np.array(res))) < 1e-10, max(abs(np.array(res)))

    tt = " + ".join(f"{v}^2" for v in t_names)
    formulas = []
    for i in range(3):
        for j in range(3):
            s_ = " + ".join(f"{t_names[c_]}*{R_names[c_][j]}" for c_ in range(3))
            formulas.append((R_names[i][j], f"(2*{t_names[i]}*({s_}) - {R_names[i][j]}*({tt}))/({tt})"))
    for v in t_names:
        formulas.append((v, v))
    for i in range(5):
        yv = [yn[i][r] if (homogeneous or r < 2) else "1" for r in range(3)]
        ty = " + ".join(f"{t_names[r]}*{yv[r]}" for r in range(3))
        den = f"(2*{beta[i]}*({ty}) - ({tt}))"
        formulas.append((alpha[i], f"-{alpha[i]}*({tt})/{den}"))
        formulas.append((beta[i], f"{beta[i]}*({tt})/{den}"))

    H = 2 * np.outer(t, t) / (t @ t) - np.eye(3)
    R2 = H @ R
    res = orthogonality_residual(R2)
    for i in range(5):
        d = 2 * bes[i] * (t @ ys[i]) - t @ t
        a2, b2 = -als[i] * (t @ t) / d, bes[i] * (t @ t) / d
        res += list(b2 * ys[i] - (R2 @ (a2 * xs[i]) + t))
    assert max(abs(np.array(res))) < 1e-9, max(abs(np.array(res)))
    return unknowns, params, eqs, xval, pval, formulas


def emit(name, comment, data):
    unknowns, params, eqs, xval, pval, formulas = data
    write_system(f"{name}.sys", comment, unknowns, params, eqs)
    write_seed(f"{name}.seed", "vision_fixtures.py", xval, pval)
    write_formulas(f"{name}.deck", formulas)


emit("p3p_inhom", "absolute pose from three points, affine image and world points", p3p(False))
emit("p3p_qh", "absolute pose from three points, projective image and world points", p3p(True))
emit("5pp_inhom", "relative pose from five points, affine image points, chart c . t = 1", five_point(False))
emit("5pp_qh", "relative pose from five points, projective image points, chart c . t = 1", five_point(True))
