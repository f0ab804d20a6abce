"""Matrix exponential and logarithm on the powerful lattice bold-p * M_l(Zp).

Terms are summed until a monotone lower bound on their valuation passes
the precision; powers are formed with guard digits so that every division
by i! (or i) is an exact integer division.
"""
from __future__ import annotations

from ..errors import ValuationTooLow
from ..zp import PadicMatrix, bold_p_valuation, matmul_int, vp, vp_factorial


def _lower_bound_exp(i, w, p):
    # i*w - v_p(i!) >= i*w - (i-1)/(p-1), increasing in i
    return i * w - (i - 1) / (p - 1)


def exp_order(p: int, k: int, w: int | None = None) -> int:
    """Largest i whose term A^i/i! can be nonzero mod p^k."""
    w = w or bold_p_valuation(p)
    i = 1
    while _lower_bound_exp(i + 1, w, p) < k:
        i += 1
    return i


def log_order(p: int, k: int, w: int | None = None) -> int:
    w = w or bold_p_valuation(p)
    i = 1
    # i*w - v_p(i) >= i*w - log_p(i)
    while True:
        nxt = i + 1
        bound = min(nxt * w - vp(j, p, cap=10 ** 6) for j in range(nxt, 2 * nxt + 1))
        if bound >= k and nxt * w - _log_p_floor(nxt, p) >= k:
            return i
        i += 1


def _log_p_floor(n, p):
    e = 0
    while p ** (e + 1) <= n:
        e += 1
    return e


def _check_domain(A: PadicMatrix, shift_identity=False):
    p, k = A.prime, A.precision
    w = bold_p_valuation(p)
    rows = A.rows
    if shift_identity:
        rows = [[a - int(i == j) for j, a in enumerate(r)] for i, r in enumerate(rows)]
    m = p ** k
    for r in rows:
        for a in r:
            if vp(a % m, p, cap=k) < w:
                raise ValuationTooLow(
                    f"entry {a % m} has valuation below {w}; outside the exp/log domain")
    return rows


def mat_exp(A: PadicMatrix) -> PadicMatrix:
    p, k = A.prime, A.precision
    rows = _check_domain(A)
    K = exp_order(p, k)
    guard = vp_factorial(K, p)
    M = p ** (k + guard)
    m = p ** k
    n = len(rows)
    acc = [[int(i == j) for j in range(n)] for i in range(n)]
    power = [list(r) for r in rows]
    for i in range(1, K + 1):
        f = 1
        for j in range(2, i + 1):
            f *= j
        a = vp(f, p)
        unit_inv = pow(f // p ** a, -1, m)
        for r in range(n):
            for c in range(n):
                x = power[r][c] % M
                # x is divisible by p^a since A^i has valuation >= i*w >= v_p(i!)
                acc[r][c] += (x // p ** a) * unit_inv
        if i < K:
            power = matmul_int(power, rows, M)
            if not any(any(r) for r in power):
                break
    return PadicMatrix(p, k, acc)


def mat_log(B: PadicMatrix) -> PadicMatrix:
    p, k = B.prime, B.precision
    X = _check_domain(B, shift_identity=True)
    K = log_order(p, k)
    guard = max(vp(i, p, cap=10 ** 6) for i in range(1, K + 1))
    M = p ** (k + guard)
    m = p ** k
    n = len(X)
    acc = [[0] * n for _ in range(n)]
    power = [list(r) for r in X]
    for i in range(1, K + 1):
        a = vp(i, p)
        unit_inv = pow(i // p ** a, -1, m)
        sign = 1 if i % 2 else -1
        for r in range(n):
            for c in range(n):
                acc[r][c] += sign * ((power[r][c] % M) // p ** a) * unit_inv
        if i < K:
            power = matmul_int(power, X, M)
            if not any(any(r) for r in power):
                break
    return PadicMatrix(p, k, acc)


def bch(A: PadicMatrix, B: PadicMatrix) -> PadicMatrix:
    """log(exp(A) exp(B)); exact at precision, no symbolic series involved."""
    return mat_log(mat_exp(A) @ mat_exp(B))


class ScaledExp:
    """exp(mu * M) for a fixed integer matrix M and p-adic scalars mu of valuation >= w.

    Powers of M are computed once; each evaluation only needs the scalar
    coefficients mu^j / j!.
    """

    def __init__(self, M: PadicMatrix):
        self.p, self.k = M.prime, M.precision
        self.n = M.shape[0]
        self.w = bold_p_valuation(self.p)
        self.order = exp_order(self.p, self.k, self.w)
        m = self.p ** self.k
        self.powers = [[[int(i == j) for j in range(self.n)] for i in range(self.n)]]
        cur = [list(r) for r in M.rows]
        for _ in range(self.order):
            if not any(any(r) for r in cur):
                break
            self.powers.append(cur)
            cur = matmul_int(cur, M.rows, m)
        self._facts = []
        f = 1
        for j in range(len(self.powers)):
            if j:
                f *= j
            a = vp(f, self.p)
            self._facts.append((a, pow(f // self.p ** a, -1, m)))

    def __call__(self, mu: int):
        p, m = self.p, self.p ** self.k
        if mu % m == 0:
            return [list(r) for r in self.powers[0]]
        if vp(mu % m, p, cap=self.k) < self.w:
            raise ValuationTooLow(f"scalar {mu % m} outside the exp domain")
        out = [[0] * self.n for _ in range(self.n)]
        mj = 1
        for j, P in enumerate(self.powers):
            if j:
                mj *= mu
            a, uinv = self._facts[j]
            coeff = (mj // p ** a) * uinv % m
            if coeff:
                for r in range(self.n):
                    row, src = out[r], P[r]
                    for c in range(self.n):
                        if src[c]:
                            row[c] += coeff * src[c]
        return [[x % m for x in r] for r in out]
