#!/usr/bin/env python3
"""Regenerates the committed fixture files in this directory.

The 2x2 network is hand-tuned so that the two blob classes land in
different activation regions and the class-0 region admits a small
verified specification. Run from the repository root:

    python3 fixtures/make_fixtures.py
"""
import json
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))

W1 = np.array([[1.0, 0.0], [0.0, 1.0]])
B1 = np.array([-0.5, -0.5])
W2 = np.array([[1.0, -1.0], [1.0, 1.0]])
B2 = np.array([0.0, -0.25])
W3 = np.array([[0.05, -1.0], [-0.05, 1.0]])
B3 = np.array([0.005, -0.005])


def forward(pts):
    z1 = pts @ W1.T + B1
    h1 = np.maximum(z1, 0)
    z2 = h1 @ W2.T + B2
    h2 = np.maximum(z2, 0)
    return z1, z2, h2 @ W3.T + B3


def labels_for(pts):
    _, _, out = forward(pts)
    return ((out[:, 0] - out[:, 1]) <= 0).astype(int)


def write_json(name, obj):
    with open(os.path.join(HERE, name), "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def write_csv(name, pts, labels):
    with open(os.path.join(HERE, name), "w") as fh:
        fh.write("x0,x1,label\n")
        for (x0, x1), lab in zip(pts, labels):
            fh.write(f"{float(x0)!r},{float(x1)!r},{lab}\n")


def main():
    write_json("fixture2x2.json", {
        "input_dim": 2,
        "layers": [
            {"weights": W1.tolist(), "bias": B1.tolist()},
            {"weights": W2.tolist(), "bias": B2.tolist()},
            {"weights": W3.tolist(), "bias": B3.tolist()},
        ],
    })
    write_json("fixture1d.json", {
        "input_dim": 1,
        "layers": [
            {"weights": [[1.0]], "bias": [-0.3]},
            {"weights": [[1.0]], "bias": [0.0]},
        ],
    })

    rng = np.random.default_rng(20240801)

    def blob(cx, cy, sd, k):
        return np.clip(rng.normal([cx, cy], sd, size=(k, 2)), 0.0, 1.0)

    train = np.vstack([blob(0.3, 0.3, 0.07, 120), blob(0.85, 0.85, 0.06, 120)])
    test = np.vstack([blob(0.3, 0.3, 0.07, 60), blob(0.85, 0.85, 0.06, 60)])
    write_csv("fixture2x2_train.csv", train, labels_for(train))
    write_csv("fixture2x2_test.csv", test, labels_for(test))

    unit = {"lower": [0.0, 0.0], "upper": [1.0, 1.0]}
    write_json("query_class0_box.json", {
        "class": 0, "domain": unit, "ball": None,
        "tau": 1e-6, "phase_budget": 4096, "time_budget_ms": 10000,
    })
    write_json("query_class1_ball.json", {
        "class": 1, "domain": unit,
        "ball": {"center": [0.85, 0.85], "eps": 0.1},
        "tau": 1e-6, "phase_budget": 4096, "time_budget_ms": 10000,
    })
    write_json("query_class0_midball.json", {
        "class": 0, "domain": unit,
        "ball": {"center": [0.625, 0.625], "eps": 0.1},
        "tau": 1e-6, "phase_budget": 4096, "time_budget_ms": 10000,
    })

    write_json("query_class1_midball.json", {
        "class": 1, "domain": unit,
        "ball": {"center": [0.625, 0.625], "eps": 0.1},
        "tau": 1e-6, "phase_budget": 4096, "time_budget_ms": 10000,
    })
    write_json("query_class0_notime.json", {
        "class": 0, "domain": unit, "ball": None,
        "tau": 1e-6, "phase_budget": 4096, "time_budget_ms": 0,
    })

    write_json("synthetic_small.json", {
        "signature": [4],
        "clauses": [[0, 1]],
    })

    write_json("nap_min_class0.json", {"signature": [2, 2], "states": "***0"})
    write_json("nap_coarsest.json", {"signature": [2, 2], "states": "****"})
    write_json("nap_class1.json", {"signature": [2, 2], "states": "11*1"})

    # Reference values quoted in the tests.
    ltr, lte = labels_for(train), labels_for(test)
    print("train labels:", np.bincount(ltr), "test labels:", np.bincount(lte))
    for split, pts, labs in (("train", train, ltr), ("test", test, lte)):
        for c in (0, 1):
            sel = pts[labs == c]
            z1, z2, _ = forward(sel)
            act = np.hstack([z1 > 0, z2 > 0])
            frac = act.mean(axis=0)
            states = "".join(
                "0" if 1 - f >= 0.99 else "1" if f >= 0.99 else "*" for f in frac)
            print(f"{split} class {c}: n={len(sel)} nap={states} "
                  f"active_counts={act.sum(axis=0).tolist()}")

    # Margin landscape checks on a fine grid.
    g = np.linspace(0, 1, 400)
    grid = np.array([[a, b] for a in g for b in g])
    z1, z2, out = forward(grid)
    m0 = out[:, 0] - out[:, 1]
    act = np.hstack([z1 > 0, z2 > 0])
    print("grid min margin0 on region(***0):", m0[~act[:, 3]].min())
    reg0 = ~act[:, 0] & ~act[:, 1] & ~act[:, 2] & ~act[:, 3]
    print("grid min margin0 on region(0000):", m0[reg0].min())
    ball = (np.abs(grid - 0.85).max(axis=1) <= 0.1)
    reg1 = act[:, 0] & act[:, 1] & act[:, 3] & ball
    print("grid min margin1 on ball(0.85,0.1) & region(11*1):", (-m0[reg1]).min())
    mid = (np.abs(grid - 0.625).max(axis=1) <= 0.1)
    print("grid min margin0 on ball(0.625,0.1):", m0[mid].min())

    # Values used by the attack and volume tests.
    pts0 = train[ltr == 0]
    print("class0 rows exhibiting ***0:", int((forward(pts0)[1][:, 1] <= 0).sum()),
          "of", len(pts0))
    z1s, z2s, _ = forward(pts0)
    allzero = (z1s <= 0).all(axis=1) & (z2s <= 0).all(axis=1)
    print("class0 rows exhibiting 0000:", int(allzero.sum()))

    def ball_min_margin(x, eps, n=200):
        lo, hi = np.clip(x - eps, 0, 1), np.clip(x + eps, 0, 1)
        gx, gy = np.linspace(lo[0], hi[0], n), np.linspace(lo[1], hi[1], n)
        pts = np.array([[a, b] for a in gx for b in gy])
        _, _, o = forward(pts)
        return (o[:, 0] - o[:, 1]).min()

    for i in range(4):
        print(f"row{i} {pts0[i]!r} min margin in eps=0.4 ball:",
              ball_min_margin(pts0[i], 0.4))

    # Pseudo-center of the class-0 rows that exhibit ***0.
    cand = pts0[forward(pts0)[1][:, 1] <= 0]
    dists = np.abs(cand[:, None, :] - cand[None, :, :]).max(axis=2)
    radii = dists.max(axis=1)
    best = int(np.argmin(radii))
    print("pseudo-center (***0, class0 train):", repr(cand[best]),
          "radius", radii[best])
    cx, cy = cand[best]
    # region(***0) along the axes: h1(x) + h1(y) <= 0.25 with h1(t) = max(t-0.5, 0)
    hx, hy = max(cx - 0.5, 0), max(cy - 0.5, 0)
    print("expected extents: +x", min(0.75 - hy - cx, 1 - cx) - 0 if cx <= 0.5
          else None)
    print("  right edge of region along +x:", min(0.5 + (0.25 - hy), 1.0))
    print("  left/bottom edges are the domain box (0).")


if __name__ == "__main__":
    main()
