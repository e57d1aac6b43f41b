"""
Test configuration file for pytest.
"""
from fractions import Fraction

import numpy as np
import pytest

from semireal.SRCover import OPEN, Cover, Interval
from semireal.SRDataProcessor import SRDataProcessor
from semireal.SRMachine import Entry, Machine, prefix_chain_machine
from semireal.SRReal import SEQUENCE, SERIES, LscReal


@pytest.fixture
def rng():
    """A seeded generator so randomized tests are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def halving():
    """a_n = 1 - 2^-(n+1) with known limit 1."""
    return LscReal(SEQUENCE, lambda n: 1 - Fraction(1, 2 ** (n + 1)), limit=1, name="halving")


@pytest.fixture
def quarter_series():
    """Series 0, 1/4, 1/8, ... summing to 1/2."""
    return LscReal(
        SERIES,
        lambda i: Fraction(0) if i == 0 else Fraction(1, 2 ** (i + 1)),
        limit=Fraction(1, 2),
        name="quarter",
    )


@pytest.fixture
def small_machine():
    """The two-entry machine 0 -> 5 (time 7), 10 -> 3 (time 2)."""
    return Machine([Entry(7, "0", 5), Entry(2, "10", 3)], name="small")


@pytest.fixture
def chain_machine():
    """Programs 1^i 0 -> i for i < 12."""
    return prefix_chain_machine(12)


@pytest.fixture
def cover_near_one():
    """One open interval around 1, length 1/8."""
    return Cover.from_intervals([Interval(Fraction(15, 16), Fraction(17, 16), OPEN)], length_budget=Fraction(1, 8))


@pytest.fixture
def data_processor():
    """Create an SRDataProcessor reading the bundled corpus."""
    return SRDataProcessor()
