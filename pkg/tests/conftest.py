import random
from fractions import Fraction

import pytest

from crcartan.exact import GaussRat, I, standard_context
from crcartan.frames import GraphingFunctions, cubic_model


def pair_deformation(coefs_shapes):
    """Deform v2 + i v3 of the cubic by sum of coef * shape(z, zb, u)."""
    ctx = standard_context()
    x, y, u1, u2, u3 = ctx.vars("x", "y", "u1", "u2", "u3")
    i = ctx.const(I)
    z, zb = x + i * y, x - i * y
    env = {"z": z, "zb": zb, "u1": u1, "u2": u2, "u3": u3, "i": i}
    c = ctx.zero
    for coef, shape in coefs_shapes:
        c = c + ctx.const(coef) * eval(shape, {}, env)
    re = (c + c.conj()) / 2
    im = (c - c.conj()) / (2 * i)
    return GraphingFunctions(ctx, x ** 2 + y ** 2,
                             2 * x ** 3 + 2 * x * y ** 2 + re,
                             2 * x ** 2 * y + 2 * y ** 3 + im)


def phi1_deformation(expr_text):
    ctx = standard_context()
    x, y, u1, u2, u3 = ctx.vars("x", "y", "u1", "u2", "u3")
    env = {"x": x, "y": y, "u1": u1, "u2": u2, "u3": u3}
    return GraphingFunctions(ctx, x ** 2 + y ** 2 + eval(expr_text, {}, env),
                             2 * x ** 3 + 2 * x * y ** 2,
                             2 * x ** 2 * y + 2 * y ** 3)


def quartic_deformation():
    """phi1 = x^2 + y^2 + x^4; has R != 0."""
    return phi1_deformation("x**4")


def r_zero_deformation():
    """phi1 += (x^2+y^2)^2; stays in the R = 0 branch, not equivalent."""
    return phi1_deformation("(x**2+y**2)**2")


def random_deformation(seed: int, min_weight: int = 4) -> GraphingFunctions:
    """Random small-coefficient polynomial deformation of weighted order >= 4.

    Weights: x, y -> 1, u1 -> 2, u2, u3 -> 3; each phi_j may get a couple of
    monomials of weighted degree >= min_weight (one more than phi_j's own
    weight where needed to stay a higher-order perturbation).
    """
    rng = random.Random(seed)
    ctx = standard_context()
    x, y, u1, u2, u3 = ctx.vars("x", "y", "u1", "u2", "u3")
    coeffs = [Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3), Fraction(-1, 3), 1, -1]

    def monomial(wmin, wmax, allow_u):
        # u-dependence kept linear and in u1 only: richer graphs make the
        # frame denominators balloon and the identity checks crawl
        while True:
            a, b = rng.randint(0, 2), rng.randint(0, 2)
            upart, uw = ctx.one, 0
            if allow_u and rng.random() < 0.25:
                upart, uw = u1, 2
            w = a + b + uw
            if wmin <= w <= wmax:
                return x ** a * y ** b * upart

    def perturb(base_weight, allow_u):
        wmin = max(min_weight, base_weight + 1)
        c = ctx.const(GaussRat(rng.choice(coeffs)))
        return c * monomial(wmin, wmin + 1, allow_u)

    return GraphingFunctions(
        ctx,
        x ** 2 + y ** 2 + perturb(2, False),
        2 * x ** 3 + 2 * x * y ** 2 + perturb(3, True),
        2 * x ** 2 * y + 2 * y ** 3 + perturb(3, True),
    )


@pytest.fixture(scope="session")
def cubic_geometry():
    from crcartan.equivalence import Geometry
    return Geometry.build(cubic_model())


@pytest.fixture(scope="session")
def quartic_geometry():
    from crcartan.equivalence import Geometry
    return Geometry.build(quartic_deformation())
