"""Slow, definitional reference implementations used only by the tests."""
import math

import numpy as np


def naive_circle_separable(values, tol):
    """Scan every grid line angle pi*k/n directly from the definition.

    For each line the open half-circle is found from the node angles, the
    mirror node from the reflected angle, and both strict signs are looked
    for. No index tricks shared with the library.
    """
    n = len(values)
    theta = [2 * math.pi * j / n for j in range(n)]
    for k in range(2 * n):
        a = math.pi * k / n
        pos = neg = False
        for j in range(n):
            rel = (theta[j] - a) % (2 * math.pi)
            if not (1e-12 < rel < math.pi - 1e-12):
                continue
            refl = (2 * a - theta[j]) % (2 * math.pi)
            m = int(round(refl / (2 * math.pi / n))) % n
            d = values[m] - values[j]
            pos |= d > tol
            neg |= d < -tol
        if pos and neg:
            return False, a
    return True, None


def green_scalar(x, y, R=1.0):
    """Three-dimensional ball Green function, one pair at a time."""
    x = [float(t) for t in x]
    y = [float(t) for t in y]
    a = math.dist(x, y)
    rx = math.sqrt(sum(t * t for t in x))
    if rx == 0.0:
        b = R
    else:
        xt = [R * R * t / (rx * rx) for t in x]
        b = rx / R * math.dist(y, xt)
    return 1.0 / a - 1.0 / b


def forward_difference_norm_sq(vol, h):
    """h^3 sum over the box of |forward gradient|^2 + u^2 with zero padding."""
    v = np.pad(vol, 1)
    total = float(np.sum(vol ** 2))
    for d in range(3):
        total += float(np.sum(np.diff(v, axis=d) ** 2)) / h ** 2
    return h ** 3 * total


def central_gradient(f, u, direction, step):
    return (f(u + step * direction) - f(u - step * direction)) / (2 * step)
