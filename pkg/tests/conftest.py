"""Shared test helpers: a scripted randomness source for forcing exact
draws, and small independent oracles (Horner evaluation, exhaustive
coefficient search, naive matrix-vector product) used to cross-check the
library's arithmetic paths."""

import itertools


class ScriptedRng:
    """Returns a preset sequence of values from randrange.

    Used to force key generation and splitting onto specific field
    elements; raises IndexError if the code under test draws more values
    than were scripted.
    """

    def __init__(self, values):
        self.values = list(values)

    def randrange(self, *args, **kwargs):
        return self.values.pop(0)


def horner_eval(coeffs, x, p):
    """Evaluate a polynomial given ascending coefficients; independent of
    the library's Lagrange-form evaluation."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def coeffs_by_enumeration(points, p):
    """Exhaustively search for the unique coefficient vector of degree
    len(points)-1 through the given points.  Only viable for tiny p/t."""
    t = len(points)
    matches = [
        coeffs
        for coeffs in itertools.product(range(p), repeat=t)
        if all(horner_eval(coeffs, x, p) == y for x, y in points)
    ]
    assert len(matches) == 1, f"expected a unique interpolant, found {len(matches)}"
    return matches[0]


def mat_vec(matrix, vec, p):
    return [sum(a * b for a, b in zip(row, vec)) % p for row in matrix]
