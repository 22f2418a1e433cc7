"""Slow, independent reference computations used by the tests.

Nothing here imports the package's numerical code: the update rule is
re-derived with plain Python floats and ``math``.
"""

import itertools
import math


def brute_step(theta, x, noise, r, v, B):
    """One synchronous update written out pairwise."""
    n = len(theta)
    new_theta = []
    for i in range(n):
        members = [j for j in range(n) if math.dist(x[i], x[j]) <= r]
        new_theta.append(sum(theta[j] for j in members) / len(members) + noise[i])
    new_x = []
    for i in range(n):
        px = x[i][0] + v * math.cos(new_theta[i])
        py = x[i][1] + v * math.sin(new_theta[i])
        new_x.append((min(max(px, 0.0), B), min(max(py, 0.0), B)))
    return new_theta, new_x


def brute_neighbors(x, i, r):
    return {j for j in range(len(x)) if math.dist(x[i], x[j]) <= r}


def brute_max_pair(values, dist):
    return max((dist(a, b) for a, b in itertools.combinations(values, 2)), default=0.0)


def brute_components(x, r):
    """Transitive closure by repeated merging of overlapping neighbour sets."""
    groups = [brute_neighbors(x, i, r) for i in range(len(x))]
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(range(len(groups)), 2):
            if groups[a] & groups[b]:
                groups[a] |= groups.pop(b)
                changed = True
                break
    return sorted(tuple(sorted(g)) for g in groups)


def two_point_pair_spread(delta):
    """E max|xi_1 - xi_2| over the four equiprobable sign patterns."""
    outcomes = [abs(s1 * delta - s2 * delta) for s1, s2 in itertools.product((-1, 1), repeat=2)]
    return sum(outcomes) / len(outcomes)
