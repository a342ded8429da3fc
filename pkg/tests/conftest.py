"""Shared test fixtures for the soft torus certifier tests."""

import os
import tempfile

import numpy as np
import pytest

from soft_torus.certify import verify_certificate
from soft_torus.matcore import random_contraction, random_hermitian, random_unitary

TEST_SEED = 20240611

SAMPLE_COMMUTATOR = "u*v - v*u"
SAMPLE_POLYS = [
    "u*v - v*u",
    "u + u'",
    "(1+2i)*u*u'",
    "v*u - 2*u_1*v",
    "u_-1'*u_0 + 0.5*v'",
    "(u + v)*(u - v)'",
    "v*v*u - u_2*v*v",
    "1",
]


@pytest.fixture
def rng():
    """Seeded numpy generator; every test gets a fresh stream."""
    return np.random.default_rng(TEST_SEED)


@pytest.fixture
def make_unitary(rng):
    """Factory for seeded Haar unitaries."""
    return lambda dim: random_unitary(rng, dim)


@pytest.fixture
def make_hermitian(rng):
    """Factory for seeded random Hermitian matrices."""
    return lambda dim: random_hermitian(rng, dim)


@pytest.fixture
def make_contraction(rng):
    """Factory for seeded random contractions."""
    return lambda dim: random_contraction(rng, dim)


@pytest.fixture
def tmp_json_path():
    """Provide a temporary JSON file path."""
    with tempfile.NamedTemporaryFile(suffix=".json", delete=False) as f:
        path = f.name
    yield path
    try:
        os.unlink(path)
    except OSError:
        pass


@pytest.fixture
def sample_polys():
    """Polynomial texts covering adjoints, complex coefficients and shifted letters."""
    return list(SAMPLE_POLYS)


@pytest.fixture
def assert_faithful_trace():
    """Check that a certificate's normalized trace witnesses its norm."""

    def check(certificate):
        report = verify_certificate(certificate)
        result = next(c for c in report.checks if c.name == "faithful_trace")
        assert result.passed, result.detail

    return check
