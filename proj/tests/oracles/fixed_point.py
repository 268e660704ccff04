"""Symmetric three-STA fixed point by bisection on tau - f(1 - (1 - tau)^2)."""
import mpmath as mp
from edca_renewal import tau

mp.mp.dps = 50


def symmetric(params, n_sta, n):
    g = lambda t: t - tau(*params, 1 - (1 - t) ** (n_sta - 1), n)
    lo, hi = mp.mpf(0), mp.mpf(1) / 3
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


if __name__ == "__main__":
    t = symmetric((16, 2, 1, 1, 1.0, 0), 3, 119)
    print("tau", mp.nstr(t, 20), "p", mp.nstr(1 - (1 - t) ** 2, 20))
    tt = mp.mpf(1000) / 1070
    tp = mp.mpf(1061) / 1070
    print("throughput x=1 r=6", mp.nstr(6e6 * tt / (2 - tp), 20))
    print("airtime x=1", mp.nstr(1 / (2 - tp), 20))
