"""Independent reference computations used by several test modules."""

import numpy as np


def _ternary(fn, lo, hi, iters=200):
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def _best_on_segment(p, d, upper):
    # argmin over b in [0, upper] of |p + b d|^2
    dd = d @ d
    b = 0.0 if dd == 0 else min(max(-(p @ d) / dd, 0.0), upper)
    return p + b * d


def brute_min_norm(W):
    """Min-norm point of conv(W) for |W| <= 3 by ternary search over the simplex."""
    W = np.asarray(W, dtype=float)
    k = W.shape[0]
    if k == 1:
        return W[0]
    if k == 2:
        lam = _ternary(lambda a: np.sum((a * W[0] + (1 - a) * W[1]) ** 2), 0.0, 1.0)
        return lam * W[0] + (1 - lam) * W[1]
    if k == 3:
        def inner(a):
            p = W[2] + a * (W[0] - W[2])
            return _best_on_segment(p, W[1] - W[2], 1.0 - a)

        a = _ternary(lambda a: np.sum(inner(a) ** 2), 0.0, 1.0)
        return inner(a)
    raise ValueError("brute force handles at most 3 points")


def phi_linear_scan(x, imax=60):
    """phi via an explicit scan of the breakpoint list, vectorized over x."""
    x = np.asarray(x, dtype=float)
    out = np.where(x < 0, -0.5 * x, 1.0)
    # breakpoints in increasing order with their phi values
    xs = [0.0]
    ys = [0.0]
    for i in range(imax + 1):
        xs += [1 - 7 * 2.0 ** (-i - 3), 1 - 5 * 2.0 ** (-i - 3)]
        ys += [1 - 9 * 2.0 ** (-2 * i - 3), 1 - 3 * 2.0 ** (-2 * i - 4)]
    xs.append(1.0)
    ys.append(1.0)
    for k in range(len(xs) - 1):
        lo, hi = xs[k], xs[k + 1]
        if hi <= lo:
            continue
        mask = (x >= lo) & (x < hi)
        out = np.where(mask, ys[k] + (ys[k + 1] - ys[k]) / (hi - lo) * (x - lo), out)
    return out


CORPUS_FUNCTIONS = ("counterexample", "cone:2", "cone:3", "cone:5", "abs", "maxnorm:3", "maxnorm:5", "maxquad")


def bisection_corpus(size, seed=7):
    """Random (name, oracle, x0, eps, c, v) configurations whose direction
    fails sufficient descent (c_min < c), including c barely above c_min."""
    from dgsampling.bisection import c_min
    from dgsampling.testfns import get_oracle

    rng = np.random.default_rng(seed)
    oracles = {name: get_oracle(name) for name in CORPUS_FUNCTIONS}
    out = []
    while len(out) < size:
        name = CORPUS_FUNCTIONS[rng.integers(len(CORPUS_FUNCTIONS))]
        f = oracles[name]
        n = f.dim
        pick = rng.integers(3)
        x0 = [rng.normal(size=n) * 0.5, np.round(rng.normal(size=n) * 4) / 4, np.zeros(n)][pick]
        if name == "counterexample" and rng.random() < 0.5:
            x0 = np.array([[0.0, 0.5, 0.75, 1 - 2.0 ** -rng.integers(1, 20)][rng.integers(4)]])
        v = rng.normal(size=n) * [0.1, 1.0, 5.0][rng.integers(3)]
        if rng.random() < 0.3:
            v = -f.subgrad(x0)
        if not np.linalg.norm(v) > 0:
            continue
        eps = float([0.01, 0.1, 1.0, 3.0][rng.integers(4)] * rng.uniform(0.5, 1.5))
        cm = c_min(f, x0, eps, v)
        c = float(cm) + 10.0 ** -rng.uniform(0, 8)
        if not 0 < c < 1:
            c = float(rng.uniform(0.05, 0.95))
        if not cm < c:
            continue
        out.append((name, f, x0, eps, c, v))
    return out
