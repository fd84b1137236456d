"""Independent brute-force oracles the fast implementations are checked against.

Everything here is deliberately written as plain loops with no shared code
paths into ctpatch: pair enumeration for co-occurrence, per-line scanning for
runs, explicit flood fill for zones, and support-subset enumeration for the
maximum-margin hyperplane.
"""

from __future__ import annotations

import itertools

import numpy as np

GLCM_STEPS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}


def brute_cooccurrence(pixels: np.ndarray, levels: int, displacement: int, theta: int) -> np.ndarray:
    """Enumerate every pixel pair at the offset, accumulating both orders."""
    p = np.asarray(pixels, dtype=int)
    dr, dc = GLCM_STEPS[theta]
    dr, dc = dr * displacement, dc * displacement
    h, w = p.shape
    counts = np.zeros((levels, levels), dtype=np.int64)
    for r in range(h):
        for c in range(w):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < h and 0 <= c2 < w:
                counts[p[r, c], p[r2, c2]] += 1
                counts[p[r2, c2], p[r, c]] += 1
    return counts


def brute_runs(pixels: np.ndarray, levels: int, theta: int) -> np.ndarray:
    """Scan each direction line pixel by pixel, counting maximal runs."""
    p = np.asarray(pixels, dtype=int)
    h, w = p.shape

    if theta == 0:
        lines = [[p[r, c] for c in range(w)] for r in range(h)]
    elif theta == 90:
        lines = [[p[r, c] for r in range(h)] for c in range(w)]
    elif theta == 45:
        starts = [(r, 0) for r in range(h)] + [(h - 1, c) for c in range(1, w)]
        lines = []
        for r, c in starts:
            line = []
            while r >= 0 and c < w:
                line.append(p[r, c])
                r -= 1
                c += 1
            lines.append(line)
    elif theta == 135:
        starts = [(r, 0) for r in range(h)] + [(0, c) for c in range(1, w)]
        lines = []
        for r, c in starts:
            line = []
            while r < h and c < w:
                line.append(p[r, c])
                r += 1
                c += 1
            lines.append(line)
    else:
        raise ValueError(theta)

    max_run = max(len(line) for line in lines)
    counts = np.zeros((levels, max_run), dtype=np.int64)
    for line in lines:
        pos = 0
        while pos < len(line):
            end = pos
            while end + 1 < len(line) and line[end + 1] == line[pos]:
                end += 1
            counts[line[pos], end - pos] += 1
            pos = end + 1
    return counts


def flood_fill_zones(pixels: np.ndarray, connectivity: int) -> list[tuple[int, int]]:
    """(gray level, zone size) for every connected equal-value component."""
    p = np.asarray(pixels, dtype=int)
    h, w = p.shape
    if connectivity == 8:
        steps = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    else:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    seen = np.zeros((h, w), dtype=bool)
    zones = []
    for r in range(h):
        for c in range(w):
            if seen[r, c]:
                continue
            value = p[r, c]
            stack = [(r, c)]
            seen[r, c] = True
            size = 0
            while stack:
                cr, cc = stack.pop()
                size += 1
                for dr, dc in steps:
                    nr, nc = cr + dr, cc + dc
                    if 0 <= nr < h and 0 <= nc < w and not seen[nr, nc] and p[nr, nc] == value:
                        seen[nr, nc] = True
                        stack.append((nr, nc))
            zones.append((int(value), size))
    return zones


def zones_to_matrix(zones: list[tuple[int, int]], levels: int) -> np.ndarray:
    max_zone = max((s for _, s in zones), default=1)
    counts = np.zeros((levels, max_zone), dtype=np.int64)
    for value, size in zones:
        counts[value, size - 1] += 1
    return counts


def hard_margin_hyperplane(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Maximum-margin separator via exhaustive support-subset enumeration.

    Solves the equality-constrained system for every candidate support set of
    size 2..d+1, keeps candidates that satisfy y_i (w.x_i + b) >= 1 - 1e-9 for
    all points, and returns the feasible one with minimal ||w||^2.  Exact for
    separable data; O(n^(d+1)) and only meant for tiny inputs.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = x.shape
    best = None
    best_norm = np.inf
    for size in range(2, d + 2):
        for subset in itertools.combinations(range(n), size):
            ys = y[list(subset)]
            if len(set(ys)) < 2:
                continue
            xs = x[list(subset)]
            gram = (ys[:, None] * ys[None, :]) * (xs @ xs.T)
            m = len(subset)
            system = np.zeros((m + 1, m + 1))
            system[:m, :m] = gram
            system[:m, m] = ys
            system[m, :m] = ys
            rhs = np.concatenate((np.ones(m), [0.0]))
            try:
                solution = np.linalg.solve(system, rhs)
            except np.linalg.LinAlgError:
                continue
            lam, bias = solution[:m], solution[m]
            w = (lam * ys) @ xs
            if np.any(y * (x @ w + bias) < 1.0 - 1e-9):
                continue
            norm = float(w @ w)
            if norm < best_norm:
                best_norm = norm
                best = (w, float(bias))
    if best is None:
        raise ValueError("no separating hyperplane found (data not separable?)")
    return best
