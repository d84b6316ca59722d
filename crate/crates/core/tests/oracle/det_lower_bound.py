"""Reference minimum of |det M_k(is)| exp(-Re p - Re q) over the sampled region.

Samples s log-spaced on [s0, 1e6] (1000 points) and every k with
k^2 pi^2 + 1 < s^2 <= 100 k^2 pi^2. The minimum sits at small s, so the
high-precision pass is restricted to s <= S_EXACT; above it the double
evaluation is trusted and only spot-checked.

    python3 det_lower_bound.py
"""
import mpmath as mp

mp.mp.dps = 30
S0 = mp.mpf("3.3")
S_EXACT = 200
M = 1000


def det_scaled(k, s):
    lam = 1j * s
    p = mp.sqrt(k * k * mp.pi ** 2 + lam * lam)
    # upper-half-plane limit of the radicand branch
    if s * s > k * k * mp.pi ** 2:
        p = 1j * mp.sqrt(s * s - k * k * mp.pi ** 2)
    q = mp.sqrt(k * k * mp.pi ** 2 + lam)
    d = lam * q * mp.sinh(p) * mp.cosh(q) + p * mp.sinh(q) * mp.cosh(p)
    return d * mp.exp(-p.real - q.real)


def ks(s):
    k = max(1, int(mp.ceil(s / (10 * mp.pi))))
    while k * k * mp.pi ** 2 + 1 < s * s:
        if s * s <= 100 * k * k * mp.pi ** 2:
            yield k
        k += 1


def main():
    best = (mp.inf, None, None)
    for i in range(M):
        s = S0 * (mp.mpf(10) ** 6 / S0) ** (mp.mpf(i) / (M - 1))
        if s > S_EXACT:
            break
        for k in ks(s):
            v = abs(det_scaled(k, s))
            if v < best[0]:
                best = (v, s, k)
    print("min", mp.nstr(best[0], 15), "at s", mp.nstr(best[1], 15), "k", best[2])
    for k, s in [(1, 10 ** 6), (55172, 10 ** 6), (1, 1000)]:
        print(f"|det_scaled({k}, {s})| =", mp.nstr(abs(det_scaled(k, mp.mpf(s))), 15))


main()
