"""Tour of the three 4D algebras: multiplication tables, hand products,
and the matrix view of left multiplication.

Run:  python demos/01_algebra_basics.py
"""

import numpy as np

from hyperts import AlgebraKind, hmul, left_mul_matrix, table_for

BASIS = ["1", "i", "j", "k"]


def show(vec):
    terms = []
    for c, b in zip(vec, BASIS):
        if c == 0:
            continue
        if b == "1":
            terms.append(f"{c:+.3g}")
        elif abs(c) == 1:
            terms.append(("+" if c > 0 else "-") + b)
        else:
            terms.append(f"{c:+.3g}{b}")
    return " ".join(terms) if terms else "0"


def print_table(kind):
    table = table_for(kind)
    print(f"\n{kind.value} multiplication table (row times column):")
    print("      " + "".join(f"{b:>8}" for b in BASIS))
    for a in range(4):
        cells = []
        for b in range(4):
            prod = hmul(np.eye(4)[a], np.eye(4)[b], table)
            cells.append(f"{show(prod):>8}")
        print(f"{BASIS[a]:>5} " + "".join(cells))


for kind in AlgebraKind:
    print_table(kind)

q = table_for(AlgebraKind.QUATERNION)
a = np.array([1.0, 2.0, 3.0, 4.0])
b = np.array([5.0, 6.0, 7.0, 8.0])
print("\nquaternion product (1+2i+3j+4k)(5+6i+7j+8k) =", show(hmul(a, b, q)))
print("reversed order (non-commutative):            ", show(hmul(b, a, q)))

# left multiplication by a fixed element is a linear map on R^4
w = np.array([0.0, 1.0, 0.0, 0.0])  # w = i
m = left_mul_matrix(w, q)
print("\nmatrix of left multiplication by i (quaternions):")
print(m)
print("M @ vec(j) =", m @ np.array([0.0, 0.0, 1.0, 0.0]), "  (= vec(k))")

# the coquaternion and Cl(1,1) tables have +1 squares where quaternions
# have -1, which changes the geometry the layers can express
for kind in AlgebraKind:
    t = table_for(kind)
    squares = [show(hmul(np.eye(4)[d], np.eye(4)[d], t)) for d in (1, 2, 3)]
    print(f"{kind.value:>13}: i^2={squares[0]}, j^2={squares[1]},"
          f" k^2={squares[2]}")
