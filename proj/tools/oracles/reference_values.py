"""Symbolic reference values frozen into the C++ unit tests.

Run with `python3 reference_values.py`; prints each value with 17 digits.
Everything here is computed with sympy from the defining formulas, without
touching the C++ code paths.
"""

import sympy as sp

t = sp.symbols("t")


def show(label, value):
    print(f"{label} = {sp.N(value, 17)}")


def jet(expr, at):
    return [sp.diff(expr, t, k).subs(t, at) for k in range(4)]


# Jets of family specs.
for k, v in enumerate(jet(sp.sqrt(1 + t**2), 1)):
    show(f"sqrt(1+t^2) at 1, slot {k}", v)
for k, v in enumerate(jet(1 / (1 + 2 * t), 0)):
    show(f"1/(1+2t) at 0, slot {k}", v)

# Christoffel symbols of the conformal sphere chart at x = (0.3, 0.1).
x1, x2 = sp.symbols("x1 x2")
X = [x1, x2]
c = 1
phi = 1 + sp.Rational(c, 4) * (x1**2 + x2**2)
g = sp.eye(2) / phi**2
gi = g.inv()
pt = {x1: sp.Rational(3, 10), x2: sp.Rational(1, 10)}
for k in range(2):
    for i in range(2):
        for j in range(2):
            val = sum(
                gi[k, l] * (sp.diff(g[l, i], X[j]) + sp.diff(g[l, j], X[i]) - sp.diff(g[i, j], X[l])) / 2
                for l in range(2)
            )
            show(f"Gamma^{k}_{i}{j} at (0.3,0.1)", sp.simplify(val.subs(pt)))

# Integrability coefficients for a1 = 1 + t, a3 = t, c = 1, at t = 0.2.
a1 = 1 + t
a3 = t
a2 = (1 + a3**2) / a1
d = lambda f: sp.diff(f, t)
den = a1 - 2 * t * d(a1) - 2 * c * t * a2 - 4 * c * t**2 * d(a2)
b1 = (2 * c**2 * t * a2**2 + 2 * c * t * a1 * d(a2) + a1 * d(a1) - c + 3 * c * a3**2) / den
b2 = (2 * t * d(a3) ** 2 - 2 * t * d(a1) * d(a2) + c * a2**2 + 2 * c * t * a2 * d(a2) + a1 * d(a2)) / den
b3 = (a1 * d(a3) + 2 * c * a2 * a3 + 4 * c * t * d(a2) * a3 - 2 * c * t * a2 * d(a3)) / den
t0 = sp.Rational(1, 5)
for name, f in (("b1", b1), ("b2", b2), ("b3", b3)):
    show(f"{name} at 0.2", f.subs(t, t0))
    show(f"{name}' at 0.2", d(f).subs(t, t0))
show("a2' at 1 for a1=1+t, a3=t", d(a2).subs(t, 1))

# Dense inverse of G for c = (1, 1, 0), d = (0, 0, 0.1) at x = 0, p = (0.6, 0.3).
p = sp.Matrix([sp.Rational(3, 5), sp.Rational(3, 10)])
d3 = sp.Rational(1, 10)
G = sp.zeros(4, 4)
G[:2, :2] = sp.eye(2)
G[2:, 2:] = sp.eye(2)
# G(d^j, delta_k) = c3 delta + d3 g0^j p_k with g = identity at x = 0.
G3 = d3 * p * p.T
G[2:, :2] = G3
G[:2, 2:] = G3.T
H = G.inv()
for a in range(4):
    show(f"H row {a}", sp.Matrix([H[a, b] for b in range(4)]).T.evalf(17))
