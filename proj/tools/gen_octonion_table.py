"""Tabulate basis products e_i * e_j of the Cayley-Dickson algebras.

Independent of the C++ implementation: elements are nested pairs of
floats, and the product is the textbook recursion
    (p, q)(r, s) = (p r - conj(s) q, s p + q conj(r)).
Writes a JSON table {"beta": 8, "table": [[[sign, index], ...], ...]}.
"""
import json
import sys


def build(coeffs):
    if len(coeffs) == 1:
        return coeffs[0]
    h = len(coeffs) // 2
    return (build(coeffs[:h]), build(coeffs[h:]))


def flat(x):
    if isinstance(x, tuple):
        return flat(x[0]) + flat(x[1])
    return [x]


def conj(x):
    if isinstance(x, tuple):
        return (conj(x[0]), neg(x[1]))
    return x


def neg(x):
    if isinstance(x, tuple):
        return (neg(x[0]), neg(x[1]))
    return -x


def add(x, y):
    if isinstance(x, tuple):
        return (add(x[0], y[0]), add(x[1], y[1]))
    return x + y


def mul(x, y):
    if not isinstance(x, tuple):
        return x * y
    p, q = x
    r, s = y
    return (add(mul(p, r), neg(mul(conj(s), q))), add(mul(s, p), mul(q, conj(r))))


def basis(dim, i):
    c = [0.0] * dim
    c[i] = 1.0
    return build(c)


def main():
    dim = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    table = []
    for i in range(dim):
        row = []
        for j in range(dim):
            prod = flat(mul(basis(dim, i), basis(dim, j)))
            k = next(idx for idx, v in enumerate(prod) if v != 0.0)
            row.append([int(prod[k]), k])
        table.append(row)
    json.dump({"beta": dim, "table": table}, sys.stdout)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
