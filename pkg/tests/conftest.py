import random
from fractions import Fraction

import mpmath
import pytest

from radix.seqspec import NormalizedSpec


SEED = 20260218


def _radicand(rng):
    # Uniform on (0, 10] with two decimals.
    return Fraction(rng.randint(1, 1000), 100)


def _weight(rng):
    return Fraction(rng.randint(1, 500), 100)


def _exponent(rng):
    return Fraction(rng.randint(1, 100), 100)


def plain_spec(rng, horizon):
    return NormalizedSpec(
        kind="plain",
        a=tuple(_radicand(rng) for _ in range(horizon)),
        r=tuple(rng.randint(1, 5) for _ in range(horizon)),
        index_map=tuple(range(1, horizon + 1)),
    )


def weighted_spec(rng, horizon):
    return NormalizedSpec(
        kind="weighted",
        a=tuple(_radicand(rng) for _ in range(horizon)),
        b=tuple(_weight(rng) for _ in range(horizon)),
        r=tuple(rng.randint(1, 5) for _ in range(horizon)),
        index_map=tuple(range(1, horizon + 1)),
    )


def power_spec(rng, horizon):
    return NormalizedSpec(
        kind="power",
        a=tuple(_radicand(rng) for _ in range(horizon)),
        p=tuple(_exponent(rng) for _ in range(horizon)),
        index_map=tuple(range(1, horizon + 1)),
    )


def _corpus(make):
    def build(count, horizon, seed=SEED):
        rng = random.Random(seed)
        return [make(rng, horizon) for _ in range(count)]

    return build


@pytest.fixture
def plain_corpus():
    return _corpus(plain_spec)


@pytest.fixture
def weighted_corpus():
    return _corpus(weighted_spec)


@pytest.fixture
def power_corpus():
    return _corpus(power_spec)


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(autouse=True)
def _reset_mp():
    # Library code must not leak precision changes into the global context.
    prec = mpmath.mp.prec
    yield
    assert mpmath.mp.prec == prec
