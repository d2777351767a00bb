"""Independent high-precision derivations of the values frozen into the test suite.

Uses mpmath only (no numpy, no package code): populations are written out by
hand and eigenvalues come from mpmath's symmetric eigensolver.
"""
import itertools

import mpmath as mp

mp.mp.dps = 40


def shannon(ps):
    return -mp.fsum(x * mp.log(x) for x in ps if x > 0)


def vn(rows):
    w = mp.eigsy(mp.matrix(rows), eigvals_only=True)
    return -mp.fsum(x * mp.log(x) for x in w if x > mp.mpf(10) ** -30)


def tls(p, eps=1, eta=0):
    p, eps, eta = mp.mpf(p), mp.mpf(eps), mp.mpf(eta)
    off = eps * mp.sqrt(1 - eta) * mp.sqrt(p * (1 - p))
    return [[(1 - p) + eta * p, off], [off, (1 - eta) * p]]


def kron(a, b):
    n, m = len(a), len(b)
    return [[a[i // m][j // m] * b[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def energies(N):
    return [mp.mpf(2 * bin(b).count("1") - N) / 2 for b in range(2**N)]


def charge(rho, keep):
    d = len(rho)
    ps = mp.fsum(rho[i][i] for i in range(d) if keep[i])
    f = [[rho[i][j] / ps if keep[i] and keep[j] else mp.mpf(0) for j in range(d)] for i in range(d)]
    return ps, f


def coherence(rho):
    return shannon([rho[i][i] for i in range(len(rho))]) - vn(rho)


def moments(rho, N):
    h = energies(N)
    mean = mp.fsum(rho[i][i] * h[i] for i in range(len(rho)))
    return mean, mp.fsum(rho[i][i] * h[i] ** 2 for i in range(len(rho))) - mean**2


def pair_eval(p, eps=1, eta=0, N=2, keep=None):
    single = tls(p, eps, eta)
    rho = single
    for _ in range(N - 1):
        rho = kron(rho, single)
    keep = keep or [b != 0 for b in range(2**N)]
    ps, f = charge(rho, keep)
    return ps, moments(rho, N), moments(f, N), coherence(rho), coherence(f)


def no_adjacent_gg(b, N):
    s = format(b, f"0{N}b")
    return "00" not in s


if __name__ == "__main__":
    print("S(rho_j p=.1 eps=.5)", vn(tls(0.1, 0.5)))
    ps, m0, mf, c0, cf = pair_eval(mp.mpf("0.1"))
    print("pure p=.1: ps", ps, "E0,var0", m0, "Ef,varf", mf, "C0", c0, "Cf", cf)
    print("Cf via populations", shannon([mp.mpf(1) / 19, mp.mpf(9) / 19, mp.mpf(9) / 19]))
    print("cf approx at c0", mp.log(2) * (2 * c0 / 5 + 1))
    e = mp.mpf("0.5")
    num = e**2 * mp.atanh(e**2) + mp.log(mp.sqrt(1 - e**4))
    den = 1 - mp.log(2) * (5 - e) / 10
    print("dephased bound eps=.5", num / den, "quartic", e**4 / (2 * den))
    eta = mp.mpf("0.1")
    print("spont bound eta=.1", mp.log(2) / (1 - 2 * mp.log(2) / 5 * (1 + 5 * eta / 2)))
    print("spont p=.1 eta=.1", pair_eval(mp.mpf("0.1"), eta=eta)[:2])
    ps4 = pair_eval(mp.mpf("0.1"), N=4)
    print("N=4 p=.1 ps", ps4[0], "dE", ps4[2][0] - ps4[1][0])
    p0 = mp.findroot(lambda p: (lambda r: r[4] - r[3])(pair_eval(p)), mp.mpf("0.18"))
    print("pure crossing p0", p0, "C", pair_eval(p0)[3])
    pe = mp.findroot(lambda p: (lambda r: r[4] - r[3])(pair_eval(p, eps=e)), mp.mpf("0.03"))
    print("dephased eps=.5 crossing p", pe, "C", pair_eval(pe, eps=e)[3])
    for N in (3, 4):
        print("pairwise keep count N", N, sum(no_adjacent_gg(b, N) for b in range(2**N)))
    for p in ("0.05", "0.1", "0.2"):
        pw = pair_eval(mp.mpf(p), N=4, keep=[no_adjacent_gg(b, 4) for b in range(16)])
        gl = pair_eval(mp.mpf(p), N=4)
        print("N=4 p", p, "pairwise dE,Cf", pw[2][0] - pw[1][0], pw[4], "global", gl[2][0] - gl[1][0], gl[4])
    for N in (2, 3, 4):
        r = pair_eval(mp.mpf("0.05"), N=N)
        print("dC N", N, "p=.05", r[4] - r[3])
