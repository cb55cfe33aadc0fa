"""Brute-force reference computations for the fractal test fixtures.

Everything here is computed from scratch: level-m Laplacians are assembled
densely and harmonic extensions come from a Schur-complement solve, cell
coefficients come from explicit products of extension matrices per word
(no tree propagation). Run with `python3 pcf_oracle.py` to print the values
frozen into the C++ tests.
"""
import itertools
import sys

import numpy as np


def sierpinski():
    D = np.array([[-2.0, 1, 1], [1, -2, 1], [1, 1, -2]])
    glue = [((0, 1), (1, 0)), ((0, 2), (2, 0)), ((1, 2), (2, 1))]
    return dict(N=3, d=3, D=D, r=np.full(3, 0.6), glue=glue, fixed={0: 0, 1: 1, 2: 2})


def vicsek():
    D = np.ones((4, 4)) - 4 * np.eye(4)
    glue = [((0, 2), (4, 0)), ((1, 3), (4, 1)), ((2, 0), (4, 2)), ((3, 1), (4, 3))]
    return dict(N=5, d=4, D=D, r=np.full(5, 1 / 3), glue=glue, fixed={0: 0, 1: 1, 2: 2, 3: 3})


def level_vertices(s, m):
    """Union-find over all (word, slot) pairs at depths <= m."""
    N, d = s["N"], s["d"]
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)

    for k in range(m):
        for v in itertools.product(range(N), repeat=k):
            for (i, p), (j, q) in s["glue"]:
                union((v + (i,), p), (v + (j,), q))
            for i, p in s["fixed"].items():
                union((v, p), (v + (i,), p))
    slots = [(w, p) for w in itertools.product(range(N), repeat=m) for p in range(d)]
    ids, table = {}, {}
    for w, p in slots:
        root = find((w, p))
        if root not in ids:
            ids[root] = len(ids)
        table[(w, p)] = ids[root]
    return len(ids), table


def laplacian(s, m):
    n, table = level_vertices(s, m)
    H = np.zeros((n, n))
    for w in itertools.product(range(s["N"]), repeat=m):
        rw = np.prod([s["r"][i] for i in w]) if w else 1.0
        idx = [table[(w, p)] for p in range(s["d"])]
        H[np.ix_(idx, idx)] += s["D"] / rw
    return n, table, H


def extension(s, m, u):
    """Harmonic extension of boundary data u to V_m by a dense Schur solve."""
    n, table, H = laplacian(s, m)
    bnd = [table[((0,) * 0 + tuple([s_i] * m), s_i)] for s_i in range(s["d"])] if m else list(range(s["d"]))
    inner = [k for k in range(n) if k not in bnd]
    x = np.zeros(n)
    x[bnd] = u
    if inner:
        x[inner] = -np.linalg.solve(H[np.ix_(inner, inner)], H[np.ix_(inner, bnd)] @ u)
    return x, table, H


def ext_matrices(s):
    d = s["d"]
    A = [np.zeros((d, d)) for _ in range(s["N"])]
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1
        x, table, _ = extension(s, 1, e)
        for i in range(s["N"]):
            for p in range(d):
                A[i][p, j] = x[table[((i,), p)]]
    return A


def word_coeff(A, w, u):
    M = np.eye(len(u))
    for letter in w:
        M = A[letter] @ M
    return M @ u


def mass(s, A, w, f, g):
    rw = np.prod([s["r"][i] for i in w]) if w else 1.0
    return 2 / rw * (-(s["D"] @ word_coeff(A, w, f)) @ word_coeff(A, w, g))


def harmonic_family(s):
    d = s["d"]
    mstar = np.full(d, 1.0 / d)  # symmetric structures, uniform mu
    E = lambda a, b: -(s["D"] @ a) @ b
    fam = []
    for p in range(d - 1):
        u = np.zeros(d)
        u[p] = 1
        u = u - mstar @ u
        for v in fam:
            u = u - 2 * E(u, v) * v
        fam.append(u / np.sqrt(2 * E(u, u)))
    return fam


def rank_profile(s, fam, n):
    A = ext_matrices(s)
    k = len(fam)
    a = np.full(k, 1.0 / k)
    tot_w = l2 = res = 0.0
    for w in itertools.product(range(s["N"]), repeat=n):
        X = np.array([word_coeff(A, w, f) for f in fam]).T
        rw = np.prod([s["r"][i] for i in w])
        G = 2 / rw * X.T @ (-s["D"]) @ X
        lam = a @ np.diag(G)
        if lam <= 1e-14:  # null cell; the family is normalized so total mass is 1
            continue
        Z = G / lam
        M = np.sqrt(np.outer(a, a)) * Z
        ev = np.sort(np.linalg.eigvalsh(M))[::-1]
        al = int(np.argmax(a * np.diag(Z)))
        zeta = Z[:, al] / np.sqrt(Z[al, al])
        r = np.linalg.norm(Z - np.outer(zeta, zeta)) / np.linalg.norm(Z)
        tot_w += lam
        l2 += lam * ev[1]
        res += lam * r
    return l2 / tot_w, res / tot_w


def main():
    sg = sierpinski()
    A = ext_matrices(sg)
    print("SG A_1=\n", A[0])
    x, table, _ = extension(sg, 1, np.array([1.0, 0, 0]))
    print("SG ext(1,0,0) on V_1:", x)
    print("SG spectrum A_1:", np.sort(np.linalg.eigvals(A[0]).real)[::-1])
    u = np.array([1.0, 0, 0])
    print("SG masses n=1:", [mass(sg, A, (i,), u, u) for i in range(3)])
    print("vertex counts SG:", [level_vertices(sg, m)[0] for m in range(4)])
    vk = vicsek()
    print("vertex counts Vicsek:", [level_vertices(vk, m)[0] for m in range(4)])
    Av = ext_matrices(vk)
    _, _, H1 = laplacian(vk, 1)
    for i in range(5):
        print("Vicsek A_%d row sums" % (i + 1), Av[i].sum(axis=1))
    fam = harmonic_family(sg)
    print("SG harmonic family:", fam)
    for n in (2, 6, 10):
        print("SG rank profile n=%d:" % n, rank_profile(sg, fam, n))
        sys.stdout.flush()


if __name__ == "__main__" and len(sys.argv) == 1:
    main()


def extras():
    np.set_printoptions(precision=17)
    vk = vicsek()
    Av = ext_matrices(vk)
    print("Vicsek A_1=\n", Av[0])
    print("Vicsek A_5=\n", Av[4])
    fam = harmonic_family(vk)
    for n in (2, 4):
        print("Vicsek harmonic rank profile n=%d:" % n, rank_profile(vk, fam, n))
    sg = sierpinski()
    A = ext_matrices(sg)
    D = sg["D"]
    u = np.array([0.3, -1.1, 0.8])
    vals = []
    y = u - u.mean()
    for n in range(0, 26):
        vals.append(2 * (-(D @ y) @ y))
        y = A[0] @ y / 0.6
        y = y - y.mean()
    diffs = [abs(vals[n + 1] - vals[n]) for n in range(len(vals) - 1)]
    rates = [diffs[n + 1] / diffs[n] for n in range(2, 12)]
    print("generic u run-mass n=25:", vals[25], "rates:", rates)
    print("limit:", 2 * ((D[:, 0] @ u) ** 2) * 0.5)


if __name__ == "__main__" and len(sys.argv) > 1 and sys.argv[1] == "extras":
    extras()
