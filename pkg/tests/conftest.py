"""Shared fixtures: the mollifier table and two small constants ledgers.

The toy ledger uses round numbers so recursion-plan arithmetic can be
checked against hand-computed exact values; the table ledger carries the
measured step norms so scaled-summand identities come out at 1.
"""

from fractions import Fraction

import pytest

from cotrig.ledger import make_empirical_ledger
from cotrig.mollifier import build_mollifier_table


@pytest.fixture(scope="session")
def table():
    return build_mollifier_table()


@pytest.fixture(scope="session")
def toy_ledger():
    """Round-number empirical ledger: c6 = 1, c7 = 1/4, c9 = 1/256, c10 = 1/4."""
    return make_empirical_ledger(
        q=3, p=4, s_norms=(1, 2, 4, 8, 16),
        measured={"c0": 2, "c1": Fraction(1, 10), "c2": 10, "c3": 2,
                  "c4": 4, "c5": 1},
        gap=1, reference_b=Fraction(1, 4),
        provenance={"source": "round numbers for exact plan arithmetic"})


@pytest.fixture(scope="session")
def table_ledger(table):
    """Modest constants over the measured step norms; summands realizable."""
    s_norms = [Fraction(table.s_norm(j)) for j in range(table.max_order + 1)]
    return make_empirical_ledger(
        q=3, p=4, s_norms=s_norms,
        measured={"c0": 4, "c1": Fraction(2, 5), "c2": 4,
                  "c3": Fraction(1, 100), "c4": 4, "c5": 60},
        gap=1, reference_b=Fraction(1, 4),
        provenance={"source": "modest constants over measured step norms"})
