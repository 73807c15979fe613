#!/usr/bin/env python3
"""Reconstruct the June 2000 audience-reach vector shipped in data/jun2000_reach.csv.

Only six of the nineteen reach values were published individually (Yahoo,
MSN, Go, Netscape, iWon, Raging). The remaining thirteen are recovered by
constrained least squares:

  * objective: squared error between the model merger deltas
    2 * (100 s_i) * (100 s_j) and the 29 published pairwise HHI increases;
  * equality: HHI of the full vector equals the published 1183;
  * inequalities: non-negativity, the published rank order of the ratings
    key, and the published flag pattern (every published pair stays above
    the 100-point screen, every unpublished pair stays at or below it);
    flag constraints carry a 0.5-point margin so the rounded values keep them.

The published deltas are mutually inconsistent at the few-percent level, so
the residuals are not zero. Output is printed as CSV rows; values are rounded
to two decimals and the rounded vector is re-checked against every
constraint before printing.

Requires numpy and scipy. Deterministic: fixed seed, fixed start set.
"""
import itertools
import sys

import numpy as np
from scipy.optimize import minimize

# Ratings order, largest reach first.
KEY = ["Yahoo", "MSN", "Go", "Netscape", "Lycos", "AltaVista", "Excite",
       "LookSmart", "Snap", "GoTo", "iWon", "Google", "HotBot", "AskJeeves",
       "DirectHit", "WebCrawler", "NorthernLight", "OpenDirectory", "Raging"]
FIXED = {"Yahoo": 47.0, "MSN": 35.8, "Go": 19.1, "Netscape": 15.4,
         "iWon": 6.7, "Raging": 0.1}
PUBLISHED = {
    ("MSN", "Yahoo"): 1131, ("Go", "Yahoo"): 519, ("Go", "MSN"): 418,
    ("Netscape", "Yahoo"): 395, ("Netscape", "MSN"): 315, ("Netscape", "Go"): 192,
    ("Lycos", "Yahoo"): 395, ("Lycos", "MSN"): 315, ("Lycos", "Go"): 192,
    ("Lycos", "Netscape"): 163,
    ("AltaVista", "Yahoo"): 307, ("AltaVista", "MSN"): 244, ("AltaVista", "Go"): 145,
    ("AltaVista", "Netscape"): 122, ("AltaVista", "Lycos"): 122,
    ("Excite", "Yahoo"): 336, ("Excite", "MSN"): 267, ("Excite", "Go"): 160,
    ("Excite", "Netscape"): 135, ("Excite", "Lycos"): 135, ("Excite", "AltaVista"): 116,
    ("LookSmart", "Yahoo"): 195, ("LookSmart", "MSN"): 153,
    ("Snap", "Yahoo"): 192, ("Snap", "MSN"): 150,
    ("GoTo", "Yahoo"): 166, ("GoTo", "MSN"): 130,
    ("iWon", "Yahoo"): 163, ("iWon", "MSN"): 127,
}
HHI_TARGET = 1183.0
MARGIN = 0.5

FREE = [k for k in KEY if k not in FIXED]
IDX = {k: i for i, k in enumerate(KEY)}


def full(x):
    values = dict(FIXED)
    values.update(zip(FREE, x))
    return np.array([values[k] for k in KEY])


def delta(r, a, b):
    return 20000.0 * r[IDX[a]] * r[IDX[b]] / r.sum() ** 2


def hhi(r):
    return 10000.0 * (r ** 2).sum() / r.sum() ** 2


def objective(x):
    r = full(x)
    return sum((delta(r, a, b) - t) ** 2 for (a, b), t in PUBLISHED.items())


def flag_constraints():
    out = []
    for a, b in itertools.combinations(KEY, 2):
        flagged = (a, b) in PUBLISHED or (b, a) in PUBLISHED
        if flagged:
            out.append(lambda x, a=a, b=b: delta(full(x), a, b) - 100.0 - MARGIN)
        else:
            out.append(lambda x, a=a, b=b: 100.0 - MARGIN - delta(full(x), a, b))
    return out


def order_constraints():
    return [lambda x, i=i: full(x)[i] - full(x)[i + 1] for i in range(len(KEY) - 1)]


def feasible(r, tol):
    if abs(hhi(r) - HHI_TARGET) > 0.5:
        return False
    if any(r[i] < r[i + 1] - tol for i in range(len(KEY) - 1)):
        return False
    for a, b in itertools.combinations(KEY, 2):
        d = delta(r, a, b)
        flagged = (a, b) in PUBLISHED or (b, a) in PUBLISHED
        if flagged and d <= 100.0 or not flagged and d > 100.0:
            return False
    return True


def main():
    ineq = order_constraints() + flag_constraints()
    cons = [{"type": "eq", "fun": lambda x: hhi(full(x)) - HHI_TARGET}]
    cons += [{"type": "ineq", "fun": f} for f in ineq]
    rng = np.random.default_rng(20000612)
    best = None
    for _ in range(60):
        x0 = np.sort(rng.uniform(0.2, 15.4, len(FREE)))[::-1]
        res = minimize(objective, x0, method="SLSQP", constraints=cons,
                       bounds=[(0.0, None)] * len(FREE),
                       options={"maxiter": 5000, "ftol": 1e-14})
        r = full(res.x)
        if not feasible(r, 1e-6):
            continue
        if best is None or res.fun < best[0]:
            best = (res.fun, r)
    if best is None:
        sys.exit("no feasible start")
    rounded = np.round(best[1], 2)
    if not feasible(rounded, 0.0):
        sys.exit("rounded vector violates a constraint")
    print(f"# sse={best[0]:.1f} hhi={hhi(rounded):.2f} total={rounded.sum():.2f}")
    for k, v in zip(KEY, rounded):
        print(f"{k},{v:.2f}")


if __name__ == "__main__":
    main()
