"""Independent reference implementations used only by the tests.

Everything here is deliberately naive (double loops, direct formulas) so the
library code is checked against math written a second time from the
definitions, not against itself.
"""

import math

import numpy as np

MSCN_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}


def mirror_index(i, n):
    """Whole-sample reflection: index -1 maps to 1, index n maps to n-2."""
    if i < 0:
        return -i
    if i >= n:
        return 2 * n - 2 - i
    return i


def naive_mscn(data, size=7, sigma=7.0 / 6.0):
    """Per-pixel double-loop MSCN transform with mirrored borders."""
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    k1 = np.exp(-(x * x) / (2.0 * sigma * sigma))
    k1 = k1 / k1.sum()
    w = np.outer(k1, k1)

    h, wd = data.shape
    out = np.empty((h, wd), dtype=np.float64)
    for r in range(h):
        for c in range(wd):
            mu = 0.0
            ex2 = 0.0
            for dr in range(-half, half + 1):
                for dc in range(-half, half + 1):
                    v = data[mirror_index(r + dr, h), mirror_index(c + dc, wd)]
                    wt = w[dr + half, dc + half]
                    mu += wt * v
                    ex2 += wt * v * v
            sd = math.sqrt(max(ex2 - mu * mu, 0.0))
            out[r, c] = (data[r, c] - mu) / (sd + 1.0)
    return out


def glcm_bruteforce(bins, orientation, distance=1, levels=16):
    """Enumerate every pixel pair at the displacement; symmetric counts."""
    dr, dc = (d * distance for d in MSCN_OFFSETS[orientation])
    h, w = bins.shape
    counts = np.zeros((levels, levels), dtype=np.int64)
    for r in range(h):
        for c in range(w):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < h and 0 <= c2 < w:
                counts[bins[r, c], bins[r2, c2]] += 1
                counts[bins[r2, c2], bins[r, c]] += 1
    return counts / counts.sum()


def naive_lbp(data, points, radius):
    """Per-pixel circular LBP with the interpolation written out longhand."""
    band = math.ceil(radius)
    h, w = data.shape
    offsets = []
    for p in range(points):
        theta = 2.0 * math.pi * p / points
        dc = radius * math.cos(theta)
        dr = -radius * math.sin(theta)
        if abs(dr - round(dr)) < 1e-9:
            dr = float(round(dr))
        if abs(dc - round(dc)) < 1e-9:
            dc = float(round(dc))
        offsets.append((dr, dc))

    codes = np.full((h, w), -1, dtype=np.int64)
    for r in range(band, h - band):
        for c in range(band, w - band):
            gc = data[r, c]
            code = 0
            for p, (dr, dc) in enumerate(offsets):
                rf, cf = math.floor(dr), math.floor(dc)
                fr, fc = dr - rf, dc - cf
                r0, c0 = r + rf, c + cf
                r1 = r0 + 1 if fr != 0.0 else r0
                c1 = c0 + 1 if fc != 0.0 else c0
                top = data[r0, c0] + fc * (data[r0, c1] - data[r0, c0])
                bot = data[r1, c0] + fc * (data[r1, c1] - data[r1, c0])
                gp = top + fr * (bot - top)
                if gp >= gc:
                    code += 2**p
            codes[r, c] = code
    return codes


def two_pass_gaussian_oracle(rows):
    """Textbook mean and (1/(n-1)) covariance, plain loops and fsum."""
    n = len(rows)
    d = len(rows[0])
    mean = [math.fsum(r[j] for r in rows) / n for j in range(d)]
    cov = np.zeros((d, d))
    for a in range(d):
        for b in range(d):
            cov[a, b] = math.fsum(
                (r[a] - mean[a]) * (r[b] - mean[b]) for r in rows
            ) / (n - 1)
    return np.asarray(mean), cov


def silhouette_oracle(points, labels):
    """O(n^2) double-loop silhouette with per-point arithmetic."""
    pts = [np.asarray(p, dtype=np.float64) for p in points]
    n = len(pts)
    scores = []
    for i in range(n):
        same = [j for j in range(n) if labels[j] == labels[i] and j != i]
        other = [j for j in range(n) if labels[j] != labels[i]]
        if not same:
            scores.append(0.0)
            continue
        a = math.fsum(float(np.linalg.norm(pts[i] - pts[j])) for j in same) / len(same)
        b = math.fsum(float(np.linalg.norm(pts[i] - pts[j])) for j in other) / len(other)
        m = max(a, b)
        scores.append((b - a) / m if m > 0 else 0.0)
    return math.fsum(scores) / n


def ranks_oracle(values):
    """Average ranks built from sorted (value, index) pairs."""
    pairs = sorted((v, i) for i, v in enumerate(values))
    ranks = [0.0] * len(values)
    i = 0
    while i < len(pairs):
        j = i
        while j + 1 < len(pairs) and pairs[j + 1][0] == pairs[i][0]:
            j += 1
        avg = (i + 1 + j + 1) / 2.0
        for k in range(i, j + 1):
            ranks[pairs[k][1]] = avg
        i = j + 1
    return ranks


def kruskal_oracle(groups):
    """H statistic with tie correction, built on ranks_oracle."""
    pooled = [v for g in groups for v in g]
    n = len(pooled)
    ranks = ranks_oracle(pooled)
    h = 0.0
    start = 0
    for g in groups:
        r = ranks[start : start + len(g)]
        h += math.fsum(r) ** 2 / len(g)
        start += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    tie_counts = {}
    for v in pooled:
        tie_counts[v] = tie_counts.get(v, 0) + 1
    correction = 1.0 - sum(t**3 - t for t in tie_counts.values()) / (n**3 - n)
    if correction == 0.0:
        return 0.0
    return h / correction


def chi2_sf_oracle(x, df):
    """Upper chi-squared tail via incomplete-gamma series / continued fraction."""
    a = df / 2.0
    x = x / 2.0
    if x <= 0.0:
        return 1.0
    log_prefix = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        # lower series, then complement
        term = 1.0 / a
        total = term
        k = a
        while True:
            k += 1.0
            term *= x / k
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return 1.0 - total * math.exp(log_prefix)
    # modified Lentz continued fraction for the upper tail
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(log_prefix) * h


def histogram_stats_oracle(bins):
    """(mean, variance, entropy, energy) straight from the formulas."""
    n = float(sum(bins))
    mean = math.fsum(i * b for i, b in enumerate(bins)) / n
    var = math.fsum((i - mean) ** 2 * b for i, b in enumerate(bins)) / n
    probs = [b / n for b in bins]
    ent = max(-math.fsum(p * math.log(p + 1e-12) for p in probs), 0.0)
    energy = math.fsum(p * p for p in probs)
    return (mean, var, ent, energy)


def haralick_oracle(matrix):
    """Six descriptors computed formula by formula with exact summation."""
    n = matrix.shape[0]
    contrast = []
    dissim = []
    homog = []
    asm = []
    for i in range(n):
        for j in range(n):
            p = float(matrix[i, j])
            contrast.append(p * (i - j) ** 2)
            dissim.append(p * abs(i - j))
            homog.append(p / (1.0 + (i - j) ** 2))
            asm.append(p * p)
    contrast = math.fsum(contrast)
    dissim = math.fsum(dissim)
    homog = math.fsum(homog)
    asm = math.fsum(asm)
    energy = math.sqrt(asm)

    pi = [math.fsum(float(matrix[i, j]) for j in range(n)) for i in range(n)]
    pj = [math.fsum(float(matrix[i, j]) for i in range(n)) for j in range(n)]
    mu_i = math.fsum(i * pi[i] for i in range(n))
    mu_j = math.fsum(j * pj[j] for j in range(n))
    var_i = math.fsum((i - mu_i) ** 2 * pi[i] for i in range(n))
    var_j = math.fsum((j - mu_j) ** 2 * pj[j] for j in range(n))
    denom = math.sqrt(var_i) * math.sqrt(var_j)
    if denom == 0.0:
        corr = 1.0
    else:
        corr = (
            math.fsum(
                (i - mu_i) * (j - mu_j) * float(matrix[i, j])
                for i in range(n)
                for j in range(n)
            )
            / denom
        )
    return (contrast, dissim, homog, asm, energy, corr)
