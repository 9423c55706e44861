#!/usr/bin/env python3
"""Regenerates the shipped twisted Cech data under scenarios/data/.

circle3 and wedge2 are written by hand; torus9 is the product nerve of two
circle3 data; genus2 is a connected sum of two 3x3 grid tori; rp2 is the
6-vertex projective plane with its Z/2 orientation cocycle.
"""
import itertools
import json
import os
import sys


def closure(maximal):
    out = set()
    for s in maximal:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            for f in itertools.combinations(s, k):
                out.add(f)
    return sorted(out, key=lambda t: (len(t), t))


def write(path, cover_size, simplices, free_rank, torsion_orders, exps):
    doc = {
        "schema_version": 1,
        "cover_size": cover_size,
        "simplices": [list(s) for s in simplices],
        "free_rank": free_rank,
        "torsion_orders": torsion_orders,
        "edge_exponents": {f"{j},{k}": v for (j, k), v in sorted(exps.items())},
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def circle3():
    simp = closure([(1, 2), (2, 3), (1, 3)])
    exps = {(1, 2): [0], (2, 3): [0], (1, 3): [1]}
    return 3, simp, 1, [], exps


def product(a, b):
    na, sa, fa, ta, ea = a
    nb, sb, fb, tb, eb = b
    sa_set = set(sa)
    sb_set = set(sb)

    def exp_a(x, y):
        if x == y:
            return [0] * (fa + len(ta))
        return ea[(x, y)] if (x, y) in ea else [-v for v in ea[(y, x)]]

    def exp_b(x, y):
        if x == y:
            return [0] * (fb + len(tb))
        return eb[(x, y)] if (x, y) in eb else [-v for v in eb[(y, x)]]

    label = lambda p, q: (p - 1) * nb + q
    maxa = [s for s in sa if not any(set(s) < set(t) for t in sa)]
    maxb = [s for s in sb if not any(set(s) < set(t) for t in sb)]
    out = set()
    for s in maxa:
        for t in maxb:
            pts = [(p, q) for p in s for q in t]
            for k in range(1, len(pts) + 1):
                for sub in itertools.combinations(pts, k):
                    pa = tuple(sorted({p for p, _ in sub}))
                    pb = tuple(sorted({q for _, q in sub}))
                    if pa in sa_set and pb in sb_set:
                        out.add(tuple(sorted(label(p, q) for p, q in sub)))
    simp = sorted(out, key=lambda t: (len(t), t))
    inv = {label(p, q): (p, q) for p in range(1, na + 1) for q in range(1, nb + 1)}
    exps = {}
    for s in simp:
        if len(s) == 2:
            (p1, q1), (p2, q2) = inv[s[0]], inv[s[1]]
            ea_ = exp_a(p1, p2)
            eb_ = exp_b(q1, q2)
            exps[s] = ea_[:fa] + eb_[:fb] + ea_[fa:] + eb_[fb:]
    return na * nb, simp, fa + fb, ta + tb, exps


def wedge2():
    edges = [(1, 2), (2, 3), (1, 3), (1, 4), (4, 5), (1, 5)]
    simp = closure(edges)
    exps = {e: [0, 0] for e in edges}
    exps[(1, 3)] = [1, 0]
    exps[(1, 5)] = [0, 1]
    return 5, simp, 2, [], exps


def grid_torus_triangles():
    tris = []
    for i in range(3):
        for j in range(3):
            a = (i, j)
            b = ((i + 1) % 3, j)
            c = ((i + 1) % 3, (j + 1) % 3)
            d = (i, (j + 1) % 3)
            tris.append((a, b, c))
            tris.append((a, d, c))
    return tris


def wrap(u, v, axis):
    d = (v[axis] - u[axis]) % 3
    lifted = d if d <= 1 else d - 3
    return (u[axis] + lifted - v[axis]) // 3


def genus2():
    removed = {(0, 0), (1, 0), (1, 1)}
    tris = grid_torus_triangles()
    tris = [t for t in tris if set(t) != removed]

    def lab(copy, p):
        if p in removed:
            return {(0, 0): 1, (1, 0): 2, (1, 1): 3}[p]
        rest = sorted(q for q in itertools.product(range(3), range(3)) if q not in removed)
        return 4 + copy * 6 + rest.index(p)

    maximal = []
    exps = {}
    for copy in (0, 1):
        for t in tris:
            maximal.append(tuple(sorted(lab(copy, p) for p in t)))
            for u, v in itertools.combinations(t, 2):
                lu, lv = lab(copy, u), lab(copy, v)
                if lu > lv:
                    lu, lv, u, v = lv, lu, v, u
                vec = [0, 0, 0, 0]
                vec[2 * copy] = wrap(u, v, 0)
                vec[2 * copy + 1] = wrap(u, v, 1)
                prev = exps.get((lu, lv))
                if prev is not None and prev != vec:
                    if any(prev) and any(vec):
                        raise SystemExit("inconsistent shared edge")
                    vec = [a + b for a, b in zip(prev, vec)]
                exps[(lu, lv)] = vec
    simp = closure(maximal)
    return 15, simp, 4, [], exps


def rp2():
    tris = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
            (2, 3, 5), (3, 4, 6), (2, 4, 5), (3, 5, 6), (2, 4, 6)]
    simp = closure(tris)
    edges = [s for s in simp if len(s) == 2]
    idx = {e: i for i, e in enumerate(edges)}
    verts = range(1, 7)
    cob = set()
    for mask in range(1 << 6):
        x = tuple(((mask >> (j - 1)) ^ (mask >> (k - 1))) & 1 for j, k in edges)
        cob.add(x)
    for mask in range(1 << len(edges)):
        x = tuple((mask >> i) & 1 for i in range(len(edges)))
        ok = all((x[idx[(a, b)]] + x[idx[(b, c)]] + x[idx[(a, c)]]) % 2 == 0 for a, b, c in tris)
        if ok and x not in cob:
            exps = {e: [x[idx[e]]] for e in edges}
            return 6, simp, 0, [2], exps
    raise SystemExit("no nontrivial class")


def euler(simp):
    return sum((-1) ** (len(s) - 1) for s in simp)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "scenarios", "data")
    c3 = circle3()
    data = {"circle3": c3, "torus9": product(c3, c3), "wedge2": wedge2(), "genus2": genus2(), "rp2": rp2()}
    for name, d in data.items():
        write(os.path.join(out, name + ".json"), *d)
        counts = [sum(1 for s in d[1] if len(s) == k) for k in range(1, 5)]
        print(name, "I =", counts, "chi =", euler(d[1]))


if __name__ == "__main__":
    main()
