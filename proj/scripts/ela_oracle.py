#!/usr/bin/env python3
"""Reference ELA feature computation used to generate golden files.

Generates 10 shared sample sets (written to data/golden/ela_samples.csv)
and the expected feature values for each (data/golden/ela_features.csv).
Vectorised numpy/scipy implementation, independent of the C++ code path.
"""

import csv
import math
import os
import sys

import numpy as np
from scipy.spatial.distance import pdist, squareform


FEATURES = (
    ["ela_distr.skewness", "ela_distr.kurtosis", "ela_distr.number_of_peaks",
     "ela_meta.lin_simple.adj_r2", "ela_meta.lin_simple.intercept",
     "ela_meta.lin_simple.coef.min", "ela_meta.lin_simple.coef.max",
     "ela_meta.lin_simple.coef.max_by_min",
     "ela_meta.quad_simple.adj_r2", "ela_meta.quad_simple.cond"]
    + [f"disp.{stat}_{q}" for stat in
       ("ratio_mean", "ratio_median", "diff_mean", "diff_median")
       for q in ("02", "05", "10", "25")]
    + [f"ic.{n}" for n in ("h_max", "eps_s", "eps_max", "eps_ratio", "m0")]
    + ["nbc.nn_nb.sd_ratio", "nbc.nn_nb.mean_ratio", "nbc.nn_nb.cor",
       "nbc.dist_ratio.coeff_var", "nbc.nb_fitness.cor"]
    + [f"pca.{n}" for n in
       ("expl_var.cov_x", "expl_var.cor_x", "expl_var.cov_init",
        "expl_var.cor_init", "expl_var_PC1.cov_x", "expl_var_PC1.cor_x",
        "expl_var_PC1.cov_init", "expl_var_PC1.cor_init")]
)


def adj_r2_fit(X, y):
    n, p = X.shape
    A = np.hstack([np.ones((n, 1)), X])
    beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ beta
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)
    return beta[0], beta[1:], adj


def expl_var_fraction(ev):
    ev = np.sort(ev)[::-1]
    cum = np.cumsum(ev) / np.sum(ev)
    return float((np.argmax(cum >= 0.9) + 1) / len(ev))


def compute(X, y):
    n, d = X.shape
    f = {}

    # ela_distr
    m = y.mean()
    c = y - m
    m2, m3, m4 = (c ** 2).mean(), (c ** 3).mean(), (c ** 4).mean()
    f["ela_distr.skewness"] = m3 / m2 ** 1.5
    f["ela_distr.kurtosis"] = m4 / m2 ** 2 - 3.0
    sd = y.std(ddof=1)
    iqr = np.quantile(y, 0.75) - np.quantile(y, 0.25)
    bw = 0.9 * min(sd, iqr / 1.34) * n ** -0.2
    if bw > 0:
        grid = np.linspace(y.min() - 3 * bw, y.max() + 3 * bw, 512)
        dens = np.exp(-0.5 * ((grid[:, None] - y[None, :]) / bw) ** 2).sum(axis=1)
        peaks = int(np.sum((dens[1:-1] > dens[:-2]) & (dens[1:-1] > dens[2:])))
        f["ela_distr.number_of_peaks"] = max(peaks, 1)
    else:
        f["ela_distr.number_of_peaks"] = 1.0

    # ela_meta
    coef_tol = 1e-10 * max(1.0, float(np.abs(y).max()))
    icpt, coef, adj = adj_r2_fit(X, y)
    ac = np.abs(coef)
    f["ela_meta.lin_simple.adj_r2"] = adj
    f["ela_meta.lin_simple.intercept"] = icpt
    f["ela_meta.lin_simple.coef.min"] = ac.min()
    f["ela_meta.lin_simple.coef.max"] = ac.max()
    f["ela_meta.lin_simple.coef.max_by_min"] = (
        1.0 if ac.max() < coef_tol else ac.max() / ac.min())
    _, qcoef, qadj = adj_r2_fit(np.hstack([X, X ** 2]), y)
    qa = np.abs(qcoef[d:])
    f["ela_meta.quad_simple.adj_r2"] = qadj
    f["ela_meta.quad_simple.cond"] = (
        1.0 if qa.max() < coef_tol else qa.max() / qa.min())

    dist = squareform(pdist(X))

    # disp
    triu = dist[np.triu_indices(n, 1)]
    all_mean, all_median = triu.mean(), np.median(triu)
    for q, tag in ((0.02, "02"), (0.05, "05"), (0.10, "10"), (0.25, "25")):
        thr = np.quantile(y, q)
        idx = np.where(y <= thr)[0]
        if len(idx) >= 2:
            sub = dist[np.ix_(idx, idx)][np.triu_indices(len(idx), 1)]
            sm, smed = sub.mean(), np.median(sub)
        else:
            sm, smed = all_mean, all_median
        f[f"disp.ratio_mean_{tag}"] = sm / all_mean
        f[f"disp.ratio_median_{tag}"] = smed / all_median
        f[f"disp.diff_mean_{tag}"] = sm - all_mean
        f[f"disp.diff_median_{tag}"] = smed - all_median

    # ic
    tour = [0]
    used = np.zeros(n, bool)
    used[0] = True
    cur = 0
    for _ in range(n - 1):
        dd = np.where(used, np.inf, dist[cur])
        cur = int(np.argmin(dd))
        used[cur] = True
        tour.append(cur)
    tour = np.array(tour)
    seg = dist[tour[:-1], tour[1:]]
    dy = y[tour[1:]] - y[tour[:-1]]
    slope = np.where(seg > 0, dy / np.where(seg > 0, seg, 1.0), 0.0)
    max_slope = max(1e-5, np.abs(slope).max())
    eps_grid = np.concatenate(([0.0], np.logspace(-5, math.log10(max_slope),
                                                  1000)))

    def entropy(eps):
        sym = np.where(slope > eps, 1, np.where(slope < -eps, -1, 0))
        a, b = sym[:-1], sym[1:]
        total = len(a)
        h = 0.0
        for u in (-1, 0, 1):
            for v in (-1, 0, 1):
                if u == v:
                    continue
                cnt = int(np.sum((a == u) & (b == v)))
                if cnt:
                    p = cnt / total
                    h -= p * math.log(p) / math.log(6.0)
        return h

    def partial_info(eps):
        sym = np.where(slope > eps, 1, np.where(slope < -eps, -1, 0))
        m_count = 0
        prev = 0
        for sv in sym:
            if sv != 0 and sv != prev:
                m_count += 1
                prev = sv
        return m_count / len(sym)

    hs = np.array([entropy(e) for e in eps_grid])
    h_max = float(hs.max())
    pos = eps_grid[1:]
    hpos = hs[1:]
    eps_max = float(pos[int(np.argmax(hpos))]) if hpos.max() > 0 else float(pos[-1])
    m0 = partial_info(0.0)
    eps_s = float(pos[-1])
    for e, h in zip(pos, hpos):
        if h < 0.05:
            eps_s = float(e)
            break
    eps_ratio = float(pos[-1])
    for e in pos:
        if partial_info(e) < 0.5 * m0:
            eps_ratio = float(e)
            break
    f["ic.h_max"] = h_max
    f["ic.eps_s"] = math.log10(eps_s)
    f["ic.eps_max"] = math.log10(eps_max)
    f["ic.eps_ratio"] = math.log10(eps_ratio)
    f["ic.m0"] = m0

    # nbc
    big = np.where(np.eye(n, dtype=bool), np.inf, dist)
    nn = big.min(axis=1)
    nb = np.empty(n)
    for i in range(n):
        better = y < y[i]
        if better.any():
            nb[i] = dist[i][better].min()
        else:
            nb[i] = dist[i][np.arange(n) != i].max()
    ratio = nn / nb
    f["nbc.nn_nb.sd_ratio"] = nn.std(ddof=1) / nb.std(ddof=1)
    f["nbc.nn_nb.mean_ratio"] = nn.mean() / nb.mean()
    f["nbc.nn_nb.cor"] = float(np.corrcoef(nn, nb)[0, 1])
    f["nbc.dist_ratio.coeff_var"] = ratio.std(ddof=1) / ratio.mean()
    f["nbc.nb_fitness.cor"] = float(np.corrcoef(nb, y)[0, 1])

    # pca
    Xy = np.hstack([X, y[:, None]])
    for mat, tag in ((np.cov(X.T), "cov_x"), (np.corrcoef(X.T), "cor_x"),
                     (np.cov(Xy.T), "cov_init"), (np.corrcoef(Xy.T), "cor_init")):
        ev = np.linalg.eigvalsh(mat)
        f[f"pca.expl_var.{tag}"] = expl_var_fraction(ev)
        f[f"pca.expl_var_PC1.{tag}"] = float(np.max(ev) / np.sum(ev))

    for k, v in f.items():
        if not np.isfinite(v):
            ratio_like = "ratio" in k or "max_by_min" in k or "cond" in k
            f[k] = 1.0 if ratio_like else 0.0
    return f


def sample_sets():
    sets = []
    d, n = 5, 150
    gens = [
        ("sphere", lambda X: np.sum(X ** 2, axis=1)),
        ("linear", lambda X: X @ np.array([1.0, -2.0, 0.5, 3.0, -1.5]) + 4.0),
        ("rosenbrock", lambda X: np.sum(
            100 * (X[:, :-1] ** 2 - X[:, 1:]) ** 2 + (X[:, :-1] - 1) ** 2,
            axis=1)),
        ("rastrigin", lambda X: 10 * d + np.sum(
            X ** 2 - 10 * np.cos(2 * np.pi * X), axis=1)),
        ("abs_ridge", lambda X: np.abs(X[:, 0]) + 0.01 * np.sum(X ** 2, axis=1)),
    ]
    k = 0
    for rep in range(2):
        for name, gen in gens:
            rng = np.random.default_rng(1234 + 17 * k)
            X = rng.uniform(-5, 5, size=(n, d))
            y = gen(X)
            if rep == 1:
                y = y + rng.normal(0, 0.1 * max(1e-12, y.std()), size=n)
            sets.append((k, name, X, y))
            k += 1
    return sets


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "data/golden"
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "ela_samples.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["set_id", "row"] + [f"x{i}" for i in range(5)] + ["y"])
        for k, name, X, y in sample_sets():
            for r in range(len(y)):
                w.writerow([k, r] + [repr(float(v)) for v in X[r]]
                           + [repr(float(y[r]))])
    with open(os.path.join(outdir, "ela_features.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["set_id", "feature", "value"])
        for k, name, X, y in sample_sets():
            feats = compute(X, y)
            assert list(feats) == FEATURES or set(feats) == set(FEATURES)
            for name_ in FEATURES:
                w.writerow([k, name_, repr(float(feats[name_]))])
    print("wrote ela golden files")


if __name__ == "__main__":
    main()
