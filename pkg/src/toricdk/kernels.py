"""Backend selection for the box-scan kernel.

The compiled extension ``toricdk._scan`` is used when it imports; otherwise
(or with ``TORICDK_PURE_PYTHON=1`` in the environment) the numpy version in
``_scan_py`` takes over.  Both return identical arrays.
"""

import os
from fractions import Fraction
from math import ceil

import numpy as np

from . import _scan_py
from .errors import InternalLimit

try:
    if os.environ.get("TORICDK_PURE_PYTHON"):
        raise ImportError("pure python backend requested")
    from . import _scan as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
MAX_ROWS = 20
_LIMIT = 1 << 62


def _impl(backend):
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel not available")
        return _compiled.mask_scan
    return _scan_py.mask_scan


def integer_halfspaces(normals, bounds):
    """Scale ``<z, w_i> >= t_i`` (rational data, integer ``z``) to integers.

    Each row is multiplied by the lcm of its denominators; a rational right
    hand side is replaced by its ceiling, which is exact for integer ``z``.
    """
    G, h = [], []
    for w, t in zip(normals, bounds):
        w = [Fraction(x) for x in w]
        t = Fraction(t)
        den = 1
        for x in w:
            den = den * x.denominator // np.gcd(den, x.denominator)
        G.append([int(x * den) for x in w])
        h.append(ceil(t * den))
    return G, h


def mask_scan(G, h, lo, hi, backend=None):
    """Histogram of half-space masks over the integer box ``[lo, hi]``.

    Returns ``(counts, first, seen)``: ``counts[mask]`` is the number of box
    points whose satisfied-inequality set is ``mask``, ``first[mask]`` the
    lexicographically first such point and ``seen[mask]`` whether it exists.
    """
    G = [list(map(int, row)) for row in G]
    h = [int(x) for x in h]
    lo = [int(x) for x in lo]
    hi = [int(x) for x in hi]
    k = len(G)
    if k > MAX_ROWS:
        raise InternalLimit(f"{k} half-spaces exceed the kernel limit of {MAX_ROWS}")
    reach = max((abs(a) for a in lo + hi), default=0) + 1
    worst = max((sum(abs(x) for x in row) for row in G), default=0) * reach
    worst += max((abs(x) for x in h), default=0)
    if worst >= _LIMIT:
        raise InternalLimit("box scan would overflow 64-bit arithmetic")
    if k == 0:
        G = np.zeros((0, len(lo)), dtype=np.int64)
    return _impl(backend)(np.array(G, dtype=np.int64).reshape(k, len(lo)), h, lo, hi)


def iter_points(G, h, lo, hi):
    """Yield ``(point, mask)`` for every box point, lexicographically.

    Plain Python; meant for exporting tables, not for large scans.
    """
    n = len(lo)
    k = len(G)

    def rec(prefix):
        if len(prefix) == n:
            m = 0
            for i in range(k):
                if sum(a * b for a, b in zip(G[i], prefix)) >= h[i]:
                    m |= 1 << i
            yield tuple(prefix), m
            return
        j = len(prefix)
        for t in range(lo[j], hi[j] + 1):
            yield from rec(prefix + [t])

    yield from rec([])
