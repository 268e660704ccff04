"""Independent renewal-reward evaluation of the attempt probability.

Walks one cycle of the per-STA state machine (AIFS wait, backoff stages,
coin and long inter-frame wait) and divides the expected number of attempts
by the expected number of general slots. Uses mpmath at 50 digits.
Prints the values frozen into the C++ unit tests.
"""
import mpmath as mp

mp.mp.dps = 50


def run_cost(k, p, n):
    # expected slots to see k consecutive idle slots; a busy slot costs 1 + n
    s = 1 - p
    f = mp.mpf(0)
    for _ in range(k):
        f = (f + 1 + p * n) / s
    return f


def tau(w_min, m, h, a, q, l, p, n):
    p, q = mp.mpf(p), mp.mpf(q)
    if q == 0 and l > 0:
        return mp.mpf(0)
    s = 1 - p
    decrement = s + p * (1 + n + run_cost(a, p, n))
    slots = run_cost(a + 1, p, n)
    attempts = mp.mpf(0)
    reach = mp.mpf(1)
    for j in range(m + h + 1):
        w = w_min * 2 ** min(j, m)
        slots += reach * (mp.mpf(w) / 2 * decrement + 1)
        attempts += reach
        reach *= p
    if l > 0:
        slots += (1 - q) / q * l
    return attempts / slots


CASES = [
    (16, 2, 1, 1, 1.0, 0, 0.1, 119),
    (0, 0, 0, 1, 1.0, 0, 1e-9, 119),
    (0, 0, 0, 1, 1.0, 0, 0.0, 119),
    (8, 1, 1, 1, 0.5, 4, 0.2, 10),
    (15, 6, 6, 6, 0.5, 100, 0.3, 119),
    (32, 6, 6, 6, 0.3, 100, 0.6, 10),
    (1, 0, 2, 2, 0.5, 4, 0.6, 10),
]

if __name__ == "__main__":
    for c in CASES:
        print(c, mp.nstr(tau(*c), 20))
