"""Shared builders for the test suite: random elements with exact entries."""

import random
from fractions import Fraction

from qhofer import NovikovElement, QHElement, SphereClass

# The standard sweep values for the exceptional area.
NINE_A2 = [Fraction(i, 10) for i in range(1, 10)]

Q_TEXT = "F * e^{1/2*E + 1/4*F}"


def random_fraction(rng: random.Random, lo: int = -5, hi: int = 5) -> Fraction:
    num = 0
    while num == 0:
        num = rng.randint(lo, hi)
    return Fraction(num, rng.choice((1, 2, 3)))


def random_sphere_class(rng: random.Random, rank: int) -> SphereClass:
    return SphereClass(
        tuple(Fraction(rng.randint(-3, 3), rng.choice((1, 2, 4))) for _ in range(rank))
    )


def random_novikov(rng: random.Random, rank: int, max_terms: int = 3) -> NovikovElement:
    terms = [
        (random_sphere_class(rng, rank), random_fraction(rng))
        for _ in range(rng.randint(1, max_terms))
    ]
    return NovikovElement(terms)


def random_qh(rng: random.Random, model, max_terms: int = 3) -> QHElement:
    terms = [
        (
            (rng.randrange(len(model.basis)), random_sphere_class(rng, model.rank)),
            random_fraction(rng),
        )
        for _ in range(rng.randint(1, max_terms))
    ]
    return QHElement(terms)
