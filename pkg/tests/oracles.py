"""Independent reference values computed with mpmath at 30 significant digits."""

import mpmath as mp

mp.mp.dps = 30


def poch(a, q, n=None):
    """(a;q)_n for finite, infinite (None) or real order."""
    a, q = mp.mpf(a), mp.mpf(q)
    if n is None:
        return mp.qp(a, q)
    if float(n).is_integer() and n >= 0:
        return mp.qp(a, q, int(n))
    return mp.qp(a, q) / mp.qp(a * q ** mp.mpf(n), q)


def qgamma(x, q):
    return mp.qgamma(mp.mpf(x), mp.mpf(q))


def qbracket(a, q):
    q = mp.mpf(q)
    return (1 - q ** mp.mpf(a)) / (1 - q)


def phi(num, den, q, z):
    """r phi s with the usual ((-1)^n q^C(n,2))^(1+s-r) factor, by direct summation."""
    q, z = mp.mpf(q), mp.mpf(z)
    r, s = len(num), len(den)
    total = mp.mpf(0)
    term = mp.mpf(1)
    n = 0
    while True:
        total += term
        num_f = mp.fprod(1 - mp.mpf(a) * q**n for a in num)
        den_f = mp.fprod(1 - mp.mpf(b) * q**n for b in den) * (1 - q ** (n + 1))
        if num_f == 0:
            return total
        term = term * num_f / den_f * z * ((-1) * q**n) ** (1 + s - r)
        n += 1
        if n > 20 and abs(term) < mp.mpf(10) ** -28 * abs(total):
            return total
        if n > 5000:
            raise ArithmeticError("oracle series did not converge")


def gl(f, alpha, x, q):
    """Raw Grunwald-Letnikov q-derivative sum."""
    alpha, x, q = mp.mpf(alpha), mp.mpf(x), mp.mpf(q)
    s = mp.nsum(lambda n: poch(q ** -alpha, q, int(n)) / mp.qp(q, q, int(n)) * q**n * f(q**n * x), [0, mp.inf])
    return x**-alpha * (1 - q) ** -alpha * s


def dq(f, x, q):
    q = mp.mpf(q)
    return (f(x) - f(q * x)) / ((1 - q) * x)


def dq_inv(f, x, q):
    q = mp.mpf(q)
    return (f(x) - f(x / q)) / ((1 - 1 / q) * x)


def nested(op, f, n, q):
    g = f
    for _ in range(n):
        g = (lambda h: (lambda t: op(h, t, q)))(g)
    return g
