"""Independent oracles used by the tests.

Nothing here calls the package's geometry or descent code: the PGL2(Z)
oracles work with exact integer matrices and rational points only.
"""

from __future__ import annotations

from fractions import Fraction

# s1(z) = -1 - conj(z), s2(z) = 1/conj(z), s3(z) = -conj(z) as integer matrices
PGL2_GENS = {1: (-1, -1, 0, 1), 2: (0, 1, 1, 0), 3: (-1, 0, 0, 1)}
# basepoint -1/4 + 5i/4
Z0 = (Fraction(-1, 4), Fraction(5, 4))


def mat_mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def projective_key(m):
    """Matrix up to sign, i.e. an element of PGL2(Z)."""
    first = next(v for v in m if v)
    return m if first > 0 else tuple(-v for v in m)


def pgl2_lengths(max_len: int):
    """Word length of every PGL2(Z) element of length <= max_len, by BFS."""
    ident = (1, 0, 0, 1)
    lengths = {ident: 0}
    frontier = [ident]
    for ell in range(1, max_len + 1):
        nxt = []
        for m in frontier:
            for s in PGL2_GENS.values():
                k = projective_key(mat_mul(m, s))
                if k not in lengths:
                    lengths[k] = ell
                    nxt.append(k)
        frontier = nxt
    return lengths


def word_matrix(word):
    m = (1, 0, 0, 1)
    for i in word:
        m = mat_mul(m, PGL2_GENS[i])
    return projective_key(m)


def apply_exact(m, z):
    """Image of the rational point z = (x, y) under the (anti-)Möbius map m.

    Real part and modulus are the same for the holomorphic and the
    conjugated action, so only the sign of Im needs the determinant.
    """
    a, b, c, d = m
    x, y = z
    nr, ni = a * x + b, a * y
    dr, di = c * x + d, c * y
    den = dr * dr + di * di
    re = (nr * dr + ni * di) / den
    im = abs(ni * dr - nr * di) / den
    return re, im


def exact_side(i: int, z) -> int:
    """Sign of z relative to L_i: right of the verticals, outside the unit circle."""
    x, y = z
    if i == 1:
        v = x + Fraction(1, 2)
    elif i == 2:
        v = x * x + y * y - 1
    else:
        v = x
    if v == 0:
        raise AssertionError(f"point {z} lies on line {i}")
    return 1 if v > 0 else -1


def exact_tau(i: int, z):
    """One-way reflection of a rational point in the PGL2 configuration."""
    x, y = z
    base = exact_side(i, Z0)
    if exact_side(i, z) != base:
        return z
    if i == 1:
        return (-1 - x, y)
    if i == 2:
        r = x * x + y * y
        return (x / r, y / r)
    return (-x, y)


def inverse(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def exact_walk(indices):
    """Reduced walk driven by the given indices, with exact descents.

    Returns (matrix, word of moves, lazy flags).
    """
    u = (1, 0, 0, 1)
    word = []
    lazy = []
    for i in indices:
        w = apply_exact(inverse(u), Z0)
        if exact_side(i, w) != exact_side(i, Z0):
            lazy.append(True)
            continue
        lazy.append(False)
        u = mat_mul(u, PGL2_GENS[i])
        word.append(i)
    return u, word, lazy


def exact_tau_word(word, z=Z0):
    for i in reversed(word):
        z = exact_tau(i, z)
    return z
