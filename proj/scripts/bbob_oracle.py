#!/usr/bin/env python3
"""Reference implementation of the 24 noiseless BBOB functions.

Independent oracle used to generate data/golden/bbob_probe_values.csv.
Written against the published BBOB function definitions; instance
transformations are derived from the legacy linear-congruential generator
of the original benchmark code so that (function_id, instance_id) pairs
map to fixed shifts/rotations.

Deliberately written in vectorised numpy style, separate from the C++
implementation, so that transcription errors in either side show up as
golden-file mismatches.
"""

import csv
import math
import os
import sys

import numpy as np


# ---------------------------------------------------------------------------
# Legacy RNG


def unif(n, inseed):
    inseed = abs(int(inseed))
    if inseed < 1:
        inseed = 1
    rgrand = [0.0] * 32
    aktseed = float(inseed)
    for i in range(39, -1, -1):
        tmp = math.floor(aktseed / 127773.0)
        aktseed = 16807.0 * (aktseed - tmp * 127773.0) - 2836.0 * tmp
        if aktseed < 0:
            aktseed += 2147483647.0
        if i < 32:
            rgrand[i] = aktseed
    aktrand = rgrand[0]
    r = np.zeros(n)
    for i in range(n):
        tmp = math.floor(aktseed / 127773.0)
        aktseed = 16807.0 * (aktseed - tmp * 127773.0) - 2836.0 * tmp
        if aktseed < 0:
            aktseed += 2147483647.0
        j = int(math.floor(aktrand / 67108865.0))
        aktrand = rgrand[j]
        rgrand[j] = aktseed
        r[i] = aktrand / 2.147483647e9
    r[r == 0.0] = 1e-99
    return r


def gauss(n, seed):
    r = unif(2 * n, seed)
    g = np.sqrt(-2.0 * np.log(r[:n])) * np.cos(2.0 * np.pi * r[n:])
    g[g == 0.0] = 1e-99
    return g


def compute_xopt(rseed, dim):
    x = 8.0 * np.floor(1e4 * unif(dim, rseed)) / 1e4 - 4.0
    x[x == 0.0] = -1e-5
    return x


def compute_fopt(fid, iid):
    rrseed = {4: 3, 18: 17}.get(fid, fid)
    rseed = rrseed + 10000 * iid
    g1 = gauss(1, rseed)[0]
    g2 = gauss(1, rseed + 1)[0]
    return min(1000.0, max(-1000.0, math.floor(100.0 * 100.0 * g1 / g2 + 0.5) / 100.0))


def compute_rotation(seed, dim):
    b = gauss(dim * dim, seed).reshape(dim, dim)
    for i in range(dim):
        for j in range(i):
            b[i] -= np.dot(b[i], b[j]) * b[j]
        b[i] /= np.linalg.norm(b[i])
    return b


# ---------------------------------------------------------------------------
# Transformations


def t_osz(x):
    x = np.asarray(x, dtype=float)
    xhat = np.where(x != 0.0, np.log(np.abs(np.where(x != 0.0, x, 1.0))), 0.0)
    c1 = np.where(x > 0.0, 10.0, 5.5)
    c2 = np.where(x > 0.0, 7.9, 3.1)
    return np.sign(x) * np.exp(xhat + 0.049 * (np.sin(c1 * xhat) + np.sin(c2 * xhat)))


def t_osz_scalar(v):
    return float(t_osz(np.array([v]))[0])


def t_asy(x, beta):
    d = len(x)
    idx = np.arange(d)
    expo = 1.0 + beta * idx / max(d - 1, 1) * np.sqrt(np.maximum(x, 0.0))
    return np.where(x > 0.0, np.power(np.maximum(x, 0.0), expo), x)


def lam(alpha, dim):
    idx = np.arange(dim)
    return np.power(alpha, 0.5 * idx / max(dim - 1, 1))


def f_pen(x):
    return float(np.sum(np.maximum(0.0, np.abs(x) - 5.0) ** 2))


# ---------------------------------------------------------------------------
# Functions


class Problem:
    def __init__(self, fid, iid, dim):
        self.fid, self.iid, self.dim = fid, iid, dim
        base = {4: 3, 18: 17}.get(fid, fid)
        self.rseed = base + 10000 * iid
        self.fopt = compute_fopt(fid, iid)
        self.rot = compute_rotation(self.rseed + 1000000, dim)  # R
        self.rot2 = compute_rotation(self.rseed, dim)           # Q
        self.xopt = compute_xopt(self.rseed, dim)
        d = dim
        if fid == 4:
            self.xopt[0::2] = np.abs(self.xopt[0::2])
        elif fid == 5:
            self.xopt = 5.0 * np.sign(self.xopt)
        elif fid == 8:
            self.xopt = 0.75 * self.xopt
        elif fid in (9, 19):
            c = max(1.0, math.sqrt(d) / 8.0)
            self.xopt = self.rot.T @ (0.5 * np.ones(d)) / c
        elif fid == 20:
            self.xopt = 0.5 * 4.2096874633 * np.sign(unif(d, self.rseed) - 0.5)
        elif fid in (21, 22):
            self._init_gallagher()
        elif fid == 24:
            self.mu0 = 2.5
            self.xopt = 0.5 * self.mu0 * np.sign(unif(d, self.rseed) - 0.5)

    def _init_gallagher(self):
        d = self.dim
        n = 101 if self.fid == 21 else 21
        self.npeaks = n
        maxcond = 1000.0
        conds = maxcond ** np.linspace(0.0, 1.0, n - 1)
        perm = np.argsort(unif(n - 1, self.rseed))
        self.conds = np.concatenate(([maxcond], conds[perm]))
        self.wpeak = np.concatenate(
            ([10.0], 1.1 + 8.0 * np.arange(n - 1) / (n - 2)))
        scale = 10.0 if self.fid == 21 else 9.8
        y = (scale * unif(d * n, self.rseed).reshape(n, d) - scale / 2.0)
        y[0] *= 0.8
        self.peaks = y
        self.xopt = y[0].copy()
        # per-peak diagonal scalings (rotated)
        self.cdiags = np.array([lam(a, d) ** 2 / math.sqrt(a) for a in self.conds])

    def raw(self, x):
        fid, d = self.fid, self.dim
        x = np.asarray(x, dtype=float)
        if fid == 1:
            z = x - self.xopt
            return float(z @ z)
        if fid == 2:
            z = t_osz(x - self.xopt)
            return float(np.sum(10.0 ** (6.0 * np.arange(d) / (d - 1)) * z * z))
        if fid == 3:
            z = lam(10.0, d) * t_asy(t_osz(x - self.xopt), 0.2)
            return float(10.0 * (d - np.sum(np.cos(2 * np.pi * z))) + z @ z)
        if fid == 4:
            z = t_osz(x - self.xopt)
            s = 10.0 ** (0.5 * np.arange(d) / (d - 1))
            odd = (np.arange(d) % 2 == 0) & (z > 0.0)  # odd in 1-based indexing
            s = np.where(odd, 10.0 * s, s)
            sz = s * z
            return float(10.0 * (d - np.sum(np.cos(2 * np.pi * sz))) + sz @ sz
                         + 100.0 * f_pen(x))
        if fid == 5:
            s = np.sign(self.xopt) * 10.0 ** (np.arange(d) / (d - 1))
            z = np.where(x * self.xopt < 25.0, x, self.xopt)
            return float(np.sum(5.0 * np.abs(s) - s * z))
        if fid == 6:
            z = self.rot2 @ (lam(10.0, d) * (self.rot @ (x - self.xopt)))
            s = np.where(z * self.xopt > 0.0, 100.0, 1.0)
            return t_osz_scalar(float(np.sum((s * z) ** 2))) ** 0.9
        if fid == 7:
            zhat = lam(10.0, d) * (self.rot @ (x - self.xopt))
            ztilde = np.where(np.abs(zhat) > 0.5, np.floor(0.5 + zhat),
                              np.floor(0.5 + 10.0 * zhat) / 10.0)
            z = self.rot2 @ ztilde
            val = np.sum(10.0 ** (2.0 * np.arange(d) / (d - 1)) * z * z)
            return float(0.1 * max(abs(zhat[0]) / 1e4, val) + f_pen(x))
        if fid == 8:
            c = max(1.0, math.sqrt(d) / 8.0)
            z = c * (x - self.xopt) + 1.0
            return float(np.sum(100.0 * (z[:-1] ** 2 - z[1:]) ** 2
                                + (z[:-1] - 1.0) ** 2))
        if fid == 9:
            c = max(1.0, math.sqrt(d) / 8.0)
            z = c * (self.rot @ x) + 0.5
            return float(np.sum(100.0 * (z[:-1] ** 2 - z[1:]) ** 2
                                + (z[:-1] - 1.0) ** 2))
        if fid == 10:
            z = t_osz(self.rot @ (x - self.xopt))
            return float(np.sum(10.0 ** (6.0 * np.arange(d) / (d - 1)) * z * z))
        if fid == 11:
            z = t_osz(self.rot @ (x - self.xopt))
            return float(1e6 * z[0] ** 2 + np.sum(z[1:] ** 2))
        if fid == 12:
            z = self.rot @ t_asy(self.rot @ (x - self.xopt), 0.5)
            return float(z[0] ** 2 + 1e6 * np.sum(z[1:] ** 2))
        if fid == 13:
            z = self.rot2 @ (lam(10.0, d) * (self.rot @ (x - self.xopt)))
            return float(z[0] ** 2 + 100.0 * math.sqrt(np.sum(z[1:] ** 2)))
        if fid == 14:
            z = self.rot @ (x - self.xopt)
            return float(math.sqrt(np.sum(np.abs(z) ** (2.0 + 4.0 * np.arange(d)
                                                        / (d - 1)))))
        if fid == 15:
            z = self.rot @ (lam(10.0, d) * (self.rot2 @ t_asy(
                t_osz(self.rot @ (x - self.xopt)), 0.2)))
            return float(10.0 * (d - np.sum(np.cos(2 * np.pi * z))) + z @ z)
        if fid == 16:
            z = self.rot @ (lam(0.01, d) * (self.rot2 @ t_osz(
                self.rot @ (x - self.xopt))))
            k = np.arange(12)
            ak = 0.5 ** k
            bk = 3.0 ** k
            f0 = np.sum(ak * np.cos(np.pi * bk))
            inner = np.sum(ak[None, :] * np.cos(2 * np.pi * bk[None, :]
                                                * (z[:, None] + 0.5)), axis=1)
            return float(10.0 * (np.mean(inner) - f0) ** 3
                         + 10.0 / d * f_pen(x))
        if fid in (17, 18):
            alpha = 10.0 if fid == 17 else 1000.0
            z = lam(alpha, d) * (self.rot2 @ t_asy(self.rot @ (x - self.xopt),
                                                   0.5))
            s = np.sqrt(z[:-1] ** 2 + z[1:] ** 2)
            val = np.mean(np.sqrt(s) + np.sqrt(s) * np.sin(50.0 * s ** 0.2) ** 2)
            return float(val ** 2 + 10.0 * f_pen(x))
        if fid == 19:
            c = max(1.0, math.sqrt(d) / 8.0)
            z = c * (self.rot @ x) + 0.5
            s = 100.0 * (z[:-1] ** 2 - z[1:]) ** 2 + (z[:-1] - 1.0) ** 2
            return float(10.0 / (d - 1) * np.sum(s / 4000.0 - np.cos(s)) + 10.0)
        if fid == 20:
            xhat = 2.0 * np.sign(self.xopt) * x
            zhat = xhat.copy()
            zhat[1:] += 0.25 * (xhat[:-1] - 2.0 * np.abs(self.xopt[:-1]))
            z = 100.0 * (lam(10.0, d) * (zhat - 2.0 * np.abs(self.xopt))
                         + 2.0 * np.abs(self.xopt))
            return float(-np.sum(z * np.sin(np.sqrt(np.abs(z)))) / (100.0 * d)
                         + 4.189828872724339 + 100.0 * f_pen(z / 100.0))
        if fid in (21, 22):
            best = 0.0
            for i in range(self.npeaks):
                diff = self.rot @ (x - self.peaks[i])
                e = float(diff @ (self.cdiags[i] * diff))
                best = max(best, self.wpeak[i] * math.exp(-e / (2.0 * d)))
            return float(t_osz_scalar(10.0 - best) ** 2 + f_pen(x))
        if fid == 23:
            z = self.rot2 @ (lam(100.0, d) * (self.rot @ (x - self.xopt)))
            j = 2.0 ** np.arange(1, 33)
            prod = 1.0
            for i in range(d):
                term = np.sum(np.abs(j * z[i] - np.round(j * z[i])) / j)
                prod *= (1.0 + (i + 1) * term) ** (10.0 / d ** 1.2)
            return float(10.0 / d ** 2 * prod - 10.0 / d ** 2 + f_pen(x))
        if fid == 24:
            mu0 = self.mu0
            s = 1.0 - 1.0 / (2.0 * math.sqrt(d + 20.0) - 8.2)
            mu1 = -math.sqrt((mu0 ** 2 - 1.0) / s)
            xhat = 2.0 * np.sign(self.xopt) * x
            z = self.rot2 @ (lam(100.0, d) * (self.rot @ (xhat - mu0)))
            t1 = np.sum((xhat - mu0) ** 2)
            t2 = d + s * np.sum((xhat - mu1) ** 2)
            return float(min(t1, t2)
                         + 10.0 * (d - np.sum(np.cos(2 * np.pi * z)))
                         + 1e4 * f_pen(x))
        raise ValueError(fid)

    def __call__(self, x):
        return self.raw(x) + self.fopt


def probe_points(dim, n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-5.0, 5.0, size=(n, dim))
    return pts


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/golden/bbob_probe_values.csv"
    dim = 5
    n_probe = 8
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["function_id", "instance_id", "dimension", "probe_index"]
                   + [f"x{i}" for i in range(dim)] + ["f"])
        for fid in range(1, 25):
            for iid in range(1, 6):
                p = Problem(fid, iid, dim)
                pts = probe_points(dim, n_probe, 1000 * fid + iid)
                rows = [[fid, iid, dim, 0] + [repr(float(v)) for v in p.xopt]
                        + [repr(float(p(p.xopt)))]]
                for k, x in enumerate(pts):
                    rows.append([fid, iid, dim, k + 1]
                                + [repr(float(v)) for v in x]
                                + [repr(float(p(x)))])
                w.writerows(rows)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
