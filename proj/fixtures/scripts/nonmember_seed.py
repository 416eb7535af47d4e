"""Seed pair for nonmember on the component x1 = -sqrt(-1/2)."""
import numpy as np

rng = np.random.default_rng(57)
x1 = -1j / np.sqrt(2)
x2, x3, x4 = rng.normal(size=3) + 1j * rng.normal(size=3)
p1 = -x2 - 2 * x1 * x3
p2 = (3 * x3**2 + x4**2 - 4 * p1 * x1 * x3) / 2
p3 = (x1 * x3**3 + 3 * x1 * x3 * x4**2 + p1 * x3**2 + p1 * x4**2 - 2 * p2 * x1 * x3) / 2


def fmt(z):
    return f"{z.real:.17g}{z.imag:+.17g}i"


print("# generated by scripts/nonmember_seed.py")
print("x: " + ", ".join(fmt(complex(z)) for z in (x1, x2, x3, x4)) + ";")
print("p: " + ", ".join(fmt(complex(z)) for z in (p1, p2, p3)) + ";")
