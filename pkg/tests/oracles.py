"""Reference computations that share no code with the package."""
from fractions import Fraction
from itertools import product


def egcd_inverse(a, m):
    old_r, r, old_s, s = a % m, m, 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    assert old_r == 1, "not invertible"
    return old_s % m


def matmul(a, b, m):
    n, inner, cols = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(inner)) % m for j in range(cols)] for i in range(n)]


def heis_matrix(x, m):
    x1, x2, x3 = x
    return [[1, x1 % m, x3 % m], [0, 1, x2 % m], [0, 0, 1]]


def heis_coords(M):
    return (M[0][1], M[1][2], M[0][2])


def heis_mul(x, y, m):
    return heis_coords(matmul(heis_matrix(x, m), heis_matrix(y, m), m))


def heis_inv(x, m):
    x1, x2, x3 = x
    return (-x1 % m, -x2 % m, (-x3 + x1 * x2) % m)


def heis_comm(x, y, m):
    a = heis_mul(heis_inv(x, m), heis_inv(y, m), m)
    return heis_mul(a, heis_mul(x, y, m), m)


def heis_lazard_coords(x, k, p=3):
    """Lazard coordinates of a Heisenberg point in the basis p*delta_i."""
    x1, x2, x3 = x
    m = p ** (k - 1)
    half = egcd_inverse(2, p ** k)
    return ((x1 // p) % m, (x2 // p) % m, (((x3 - x1 * x2 * half) % p ** k) // p) % m)


def units_mul(x, y, m):
    """Multiplicative law via the unit group: (1+x)(1+y) - 1."""
    return ((1 + x) * (1 + y) - 1) % m


def _reduce_fraction(q: Fraction, p, k):
    m = p ** k
    assert q.denominator % p != 0, "not p-integral"
    return q.numerator * egcd_inverse(q.denominator, m) % m


def _fmat_mul(a, b):
    n = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)] for i in range(n)]


def series_exp(A, p, k, terms=None):
    """Sum of A^i / i! over the rationals, reduced mod p^k."""
    n = len(A)
    terms = terms or 4 * k + 6
    acc = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    fact = 1
    for i in range(1, terms):
        power = _fmat_mul(power, [[Fraction(x) for x in r] for r in A])
        fact *= i
        acc = [[acc[r][c] + power[r][c] / fact for c in range(n)] for r in range(n)]
    return [[_reduce_fraction(x, p, k) for x in r] for r in acc]


def series_log(B, p, k, terms=None):
    n = len(B)
    X = [[Fraction(B[i][j] - int(i == j)) for j in range(n)] for i in range(n)]
    terms = terms or 4 * k + 6
    acc = [[Fraction(0)] * n for _ in range(n)]
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(1, terms):
        power = _fmat_mul(power, X)
        sign = 1 if i % 2 else -1
        acc = [[acc[r][c] + sign * power[r][c] / i for c in range(n)] for r in range(n)]
    return [[_reduce_fraction(x, p, k) for x in r] for r in acc]


def brute_left_kernel(M, p, k):
    """All v with vM = 0 mod p^k, by enumeration."""
    m = p ** k
    rows, cols = len(M), len(M[0])
    out = set()
    for v in product(range(m), repeat=rows):
        if all(sum(v[i] * M[i][j] for i in range(rows)) % m == 0 for j in range(cols)):
            out.add(v)
    return out


def span(gens, p, k, size):
    m = p ** k
    out = {tuple([0] * size)}
    for g in gens:
        new = set()
        for v in out:
            for c in range(m):
                new.add(tuple((a + c * b) % m for a, b in zip(v, g)))
        out = new
    return out
