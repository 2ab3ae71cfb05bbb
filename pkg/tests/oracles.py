"""Independent brute-force oracles used to cross-check the implementations.

Everything here is deliberately naive: per-tick scans, exhaustive path and
spanning-tree enumeration, closed-form least squares.  Nothing imports the
code paths it checks.
"""

from __future__ import annotations

import itertools
import math


def effect_windows_bruteforce(base_row, plan_row, theta, persistence):
    """Per-tick scan: maximal half-open windows where |plan - base| >= theta,
    keeping only those of length >= persistence.  Returns
    [(t1, t2, mean_delta)]."""
    n = len(base_row)
    out = []
    t = 0
    while t < n:
        if abs(plan_row[t] - base_row[t]) >= theta:
            t1 = t
            while t < n and abs(plan_row[t] - base_row[t]) >= theta:
                t += 1
            t2 = t
            if t2 - t1 >= persistence:
                deltas = [plan_row[s] - base_row[s] for s in range(t1, t2)]
                out.append((t1, t2, sum(deltas) / len(deltas)))
        else:
            t += 1
    return out


def _path_weight(dist, path, r):
    weights = [dist[path[i]][path[i + 1]] for i in range(len(path) - 1)]
    if math.isinf(r):
        return max(weights)
    return sum(w**r for w in weights) ** (1.0 / r)


def pfnet_links_bruteforce(dist, q, r, tol=1e-9):
    """All-simple-paths enumeration: link (i, j) survives iff no path of at
    most q links is strictly shorter than the direct distance."""
    n = len(dist)
    links = set()
    for i in range(n):
        for j in range(i + 1, n):
            best = math.inf
            others = [k for k in range(n) if k not in (i, j)]
            for length in range(1, q + 1):
                for middle in itertools.permutations(others, length - 1):
                    path = (i, *middle, j)
                    best = min(best, _path_weight(dist, path, r))
            if dist[i][j] <= best + tol:
                links.add((i, j))
    return links


def mst_union_bruteforce(dist, tol=1e-9):
    """Union of all minimum spanning trees by enumerating every spanning
    tree (edge subsets of size n-1 that connect the graph)."""
    n = len(dist)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    best_weight = math.inf
    best_trees = []
    for subset in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b in subset:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if not ok:
            continue
        weight = sum(dist[a][b] for a, b in subset)
        if weight < best_weight - tol:
            best_weight = weight
            best_trees = [subset]
        elif abs(weight - best_weight) <= tol:
            best_trees.append(subset)
    union = set()
    for tree in best_trees:
        union.update(tree)
    return union


def betweenness_bruteforce(nodes, edges):
    """Exact betweenness by enumerating every simple path between every
    pair and counting shortest ones (unit edge lengths, undirected,
    unnormalized; each unordered pair counted once)."""
    adj = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)

    def all_simple_paths(s, t):
        paths = []
        stack = [(s, [s])]
        while stack:
            node, path = stack.pop()
            if node == t:
                paths.append(path)
                continue
            for nxt in adj[node]:
                if nxt not in path:
                    stack.append((nxt, path + [nxt]))
        return paths

    score = {v: 0.0 for v in nodes}
    node_list = sorted(nodes)
    for i, s in enumerate(node_list):
        for t in node_list[i + 1:]:
            paths = all_simple_paths(s, t)
            if not paths:
                continue
            shortest = min(len(p) for p in paths)
            sp = [p for p in paths if len(p) == shortest]
            for v in nodes:
                if v in (s, t):
                    continue
                through = sum(1 for p in sp if v in p)
                score[v] += through / len(sp)
    return score


def ols_closed_form(points):
    """Textbook least squares: slope, intercept, r^2, t statistic and the
    slope's two-sided p-value via the t distribution (n - 2 df)."""
    from scipy.stats import t as t_dist

    n = len(points)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in points)
    slope = sxy / sxx
    intercept = my - slope * mx
    sse = sum((y - (intercept + slope * x)) ** 2 for x, y in points)
    sst = sum((y - my) ** 2 for y in ys)
    r2 = 1.0 - sse / sst if sst > 0 else 0.0
    if sse <= 0:
        return slope, intercept, r2, math.inf, 0.0
    se = math.sqrt(sse / (n - 2) / sxx)
    t_stat = slope / se
    p = 2 * t_dist.sf(abs(t_stat), n - 2)
    return slope, intercept, r2, t_stat, p


def sync_cells_bruteforce(actions, loe_names, horizon, bucket):
    """Per-tick scan membership: action id appears in a bucket iff it is
    active at some tick inside that bucket."""
    n_buckets = max(1, math.ceil(horizon / bucket))
    cells = {(loe, b): set() for loe in loe_names for b in range(n_buckets)}
    for act_id, loe, start, duration in actions:
        for t in range(start, start + duration):
            b = t // bucket
            if (loe, b) in cells:
                cells[(loe, b)].add(act_id)
    return cells
