"""
The quantum product table of the blown-up projective plane
==========================================================

A walkthrough of the exact ring arithmetic: the basis classes, the six
degree-two and point-class products, powers of the fiber element
Q = F x e^{E/2 + F/4}, and the projective-space relation that anchors
the table.
"""

from fractions import Fraction

from qhofer import model_blowup_cp2, model_cpn, power, quantum_product

# Build the model at area parameter a^2 = 1/4: the exceptional sphere E
# has area pi/4 and the fiber F = L - E has area 3pi/4.  The product
# table itself never depends on a^2; only valuations do.
m = model_blowup_cp2(Fraction(1, 4))
print(f"model: {m.name}, basis {[name for name, _ in m.basis]}")
print()

# The full multiplication table on the non-unit basis classes.  Each
# product is a finite sum of basis classes times exponentials e^B, with
# B a sphere class written in the (E, F) coordinates.
for a in ("p", "E", "F"):
    for b in ("p", "E", "F"):
        if a <= b:
            prod = quantum_product(m, m.basis_element(a), m.basis_element(b))
            print(f"{a} * {b} = {m.format(prod)}")
print()

# Q is the Seidel element of the degree-two circle loop, up to the
# delta-dependent exponent shift.  Its powers cycle through the four
# degree strata with period four, picking up exponential factors.
q = m.element("F * e^{1/2*E + 1/4*F}")
for k in range(1, 6):
    print(f"Q^{k}  = {m.format(power(m, q, k))}")
for k in range(1, 5):
    print(f"Q^-{k} = {m.format(power(m, q, -k))}")
print()

# The same machinery specializes to complex projective space: the
# hyperplane class x satisfies x^(n+1) = 1 x e^{-L}, where L is the
# line class.  This is the standard quantum cohomology relation.
for n in range(1, 5):
    cpn = model_cpn(n)
    x = cpn.basis_element("x")
    print(f"CP^{n}: x^{n + 1} = {cpn.format(power(cpn, x, n + 1))}")
