"""Shared oracles and random generators for the test suite.

Every oracle here stays independent of the code path it checks: the hull
oracle tests chords pairwise, the factorial oracle counts prime powers in
factorials, and the composition oracle samples pointwise.
"""

from fractions import Fraction

from ramstab.branches import PolynomialValuationProfile
from ramstab.plf import PLFunction


def legendre_factorial_table(limit, p):
    """v_p(n!) for n = 0..limit, built by accumulating v_p(n)."""
    table = [0] * (limit + 1)
    for n in range(1, limit + 1):
        v, m = 0, n
        while m % p == 0:
            v += 1
            m //= p
        table[n] = table[n - 1] + v
    return table


def brute_hull_vertex_set(points):
    """Strict lower-hull vertices by exhaustive chord tests.

    A point with extreme x-coordinate is a vertex; any other point is a
    vertex iff it lies strictly below every chord of two points that
    straddle it (collinear points are excluded by the strictness).
    """
    pts = sorted(points)
    verts = []
    for idx, (x, y) in enumerate(pts):
        if idx == 0 or idx == len(pts) - 1:
            verts.append((x, y))
            continue
        is_vertex = True
        for ax, ay in pts:
            if ax >= x:
                continue
            for bx, by in pts:
                if bx <= x:
                    continue
                chord = ay + Fraction(by - ay, bx - ax) * (x - ax)
                if y >= chord:
                    is_vertex = False
                    break
            if not is_vertex:
                break
        if is_vertex:
            verts.append((x, y))
    return verts


def random_fraction(rng, max_num=12, max_den=12, signed=False):
    num = rng.randint(1, max_num)
    if signed and rng.random() < 0.5:
        num = -num
    return Fraction(num, rng.randint(1, max_den))


def random_point_set(rng, min_points=3, max_points=9, min_x=0):
    count = rng.randint(min_points, max_points)
    xs = rng.sample(range(min_x, 24), count)
    return [(x, random_fraction(rng, signed=True)) for x in xs]


def random_plf(rng, max_breaks=4):
    """A random concave increasing piecewise-linear function with f(0) = 0."""
    breaks = rng.randint(0, max_breaks)
    slopes = set()
    while len(slopes) < breaks + 1:
        slopes.add(random_fraction(rng, max_num=9, max_den=9))
    slopes = sorted(slopes, reverse=True)
    vertices = []
    x = Fraction(0)
    y = Fraction(0)
    for k in range(breaks):
        gap = random_fraction(rng, max_num=9, max_den=4)
        x += gap
        y += slopes[k] * gap
        vertices.append((x, y))
    return PLFunction(slopes[0], tuple(vertices), slopes[-1])


def random_profile(rng, p=None, r=None):
    """A random valid coefficient-valuation profile."""
    p = p if p is not None else rng.choice((2, 3, 5))
    r = r if r is not None else rng.randint(1, 3)
    q = p**r
    density = 0.55 if q <= 9 else 0.25
    coeffs = {q: 0}
    for i in range(1, q):
        if rng.random() < density:
            coeffs[i] = rng.randint(1, 6)
    return PolynomialValuationProfile(
        p=p,
        r=r,
        v_p=rng.randint(1, 3),
        coeff_valuations=coeffs,
        e_ke=rng.choice((1, 1, 2)),
    )


SAMPLE_PROFILE = PolynomialValuationProfile(
    p=3, r=2, v_p=2, coeff_valuations={1: 4, 3: 2, 4: 3, 6: 4, 7: 3, 9: 0}, e_ke=1
)

UNIFORMIZER_PROFILE = PolynomialValuationProfile(
    p=3, r=1, v_p=1, coeff_valuations={1: 2, 2: 1, 3: 0}, e_ke=1
)
