"""Independent reference values for the test suite.

Run with python3 (numpy required). The printed numbers are frozen into
tests/oracle_values.hpp; nothing here imports the C++ code.
"""
import itertools
import math

import numpy as np

M64 = (1 << 64) - 1


def philox4x64_10(ctr, key):
    c = list(ctr)
    k = list(key)
    for _ in range(10):
        p0 = 0xD2E7470EE14C6C93 * c[0]
        p1 = 0xCA5A826395121157 * c[2]
        hi0, lo0 = p0 >> 64, p0 & M64
        hi1, lo1 = p1 >> 64, p1 & M64
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0]
        k = [(k[0] + 0x9E3779B97F4A7C15) & M64, (k[1] + 0xBB67AE8584CAA73B) & M64]
    return c


# Published Random123 known answer for the zero counter and key.
assert philox4x64_10([0] * 4, [0, 0]) == [
    0x16554D9ECA36314C, 0xDB20FE9D672D0FDC, 0xD7E772CEE186176B, 0x7E68B68AEC7BA23B]


def fnv1a(s):
    h = 0xCBF29CE484222325
    for b in s.encode():
        h ^= b
        h = (h * 0x100000001B3) & M64
    return h


def tri(x, c, r, a=1.0):
    return np.maximum(0.0, 1.0 - np.abs(x - c) / r) * a


CANON = [(-2, 1, 0, 0.5), (-2, 2, 1, 1.0), (0, 1, 0, 1.0), (0, 2, 1, 0.5),
         (2, 1, 1, 1.0), (2, 2, 0, 0.5), (0, 1, 1, 0.5), (0, 2, 0, 1.0)]


def shifted_lattice_gap(n_items=10_000, grid=200_000):
    """Exact mean and sd of D = L - R for the Z+U control with 0 appended,
    integrating over U on a fine midpoint grid."""
    u = (np.arange(grid) + 0.5) / grid
    ks = np.arange(-8, 9)
    atoms = np.concatenate([np.zeros((grid, 1)), ks[None, :] + u[:, None]], axis=1)
    out = []
    for gc, gr, hc, ha in CANON:
        rhs = tri(atoms, gc, gr).sum(1) * np.exp(-tri(atoms, hc, 1.0, ha).sum(1))
        lhs = np.zeros(grid)
        for j in range(atoms.shape[1]):
            t = atoms[:, j:j + 1]
            lhs += tri(-t[:, 0], gc, gr) * np.exp(-tri(atoms - t, hc, 1.0, ha).sum(1))
        d = lhs - rhs
        out.append((d.mean(), d.std(), d.mean() / d.std() * math.sqrt(n_items)))
    return out


def heavy_tail(alpha=0.8, seeds=20000, rng=np.random.default_rng(1)):
    # Ratio of running means of 1 + ceil(Pareto) at 1e5 vs 1e3 draws.
    ratios = np.empty(seeds)
    for i in range(seeds):
        x = 1.0 + np.ceil(rng.random(100_000) ** (-1.0 / alpha))
        ratios[i] = x.mean() / x[:1000].mean()
    p = (ratios >= 5).mean()
    p4of5 = sum(math.comb(5, k) * p**k * (1 - p) ** (5 - k) for k in (4, 5))
    return p, np.median(ratios), p4of5


def ergodic_ratio(step, replicas=4000, sigma=0.5, rng=np.random.default_rng(2)):
    """var(A_64) / var(A_256) for Z+U+BM with the unit-bin count functional;
    `step` is a callable W -> grid spacing."""
    var = {}
    for w in (64, 256):
        a = np.empty(replicas)
        wt = np.empty(replicas)
        n = np.arange(-w - 8, w + 9)
        h = step(w)
        s = -w / 2 + (np.arange(round(w / h)) + 0.5) * h
        for r in range(replicas):
            b = np.zeros(len(n))
            z = np.where(n == 0)[0][0]
            inc = rng.normal(0, sigma, len(n))
            b[z + 1:] = np.cumsum(inc[z + 1:])
            b[:z] = np.cumsum(inc[:z][::-1])[::-1]
            x = np.sort(n + b)
            first = x[x > 0][0]
            x = x - first * rng.random()
            wt[r] = first
            lo = np.searchsorted(x, s)
            hi = np.searchsorted(x, s + 1)
            a[r] = (hi - lo).mean()
        p = wt / wt.sum()
        m = (p * a).sum()
        var[w] = (p * (a - m) ** 2).sum()
    return var[64] / var[256]


def main():
    kats = [([0, 0, 0, 0], [0, 0]), ([M64] * 4, [M64] * 2),
            ([0x0123456789ABCDEF, 7, 42, 99], [0xDEADBEEFCAFEF00D, 0x1234])]
    for ctr, key in kats:
        ours = philox4x64_10(ctr, key)
        print("philox", [hex(x) for x in ours])
    print("fnv1a('heavy-tail')", hex(fnv1a("heavy-tail")))

    m = 12
    image = [(x + (-x % m)) % m for x in range(m)]  # x + B_x with B_x = -x
    pairs = sum(1 for s, t in itertools.permutations(range(m), 2) if image[s] == image[t])
    print("Z_12 negation collisions", pairs)

    p = 0.3
    print("Bernoulli(0.3) Palm on Z_12 mass", 1 - (1 - p) ** m, "x2", 2 * (1 - (1 - p) ** m))

    for i, (mean, sd, z) in enumerate(shifted_lattice_gap(), 1):
        print(f"shifted lattice f{i}: E[D]={mean:.6f} sd={sd:.6f} z(1e4)={z:.3g}")

    pr, med, p4 = heavy_tail(seeds=2000)
    print(f"heavy tail alpha=0.8: P(ratio>=5)={pr:.3f} median={med:.2f} P(>=4 of 5)={p4:.3f}")

    print("ergodic ratio, step 1/16:", ergodic_ratio(lambda w: 1 / 16))
    print("ergodic ratio, step W/64:", ergodic_ratio(lambda w: w / 64))


if __name__ == "__main__":
    main()
