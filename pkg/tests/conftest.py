import pytest

from endotree.local_field import LocalField, QuadExtElement


@pytest.fixture(scope="session")
def q3_mixed():
    return LocalField(3, kind="mixed")


@pytest.fixture(scope="session")
def q3_equal():
    return LocalField(3, kind="equal_char")


@pytest.fixture(scope="session")
def q5_mixed():
    return LocalField(5, kind="mixed")


@pytest.fixture(scope="session")
def q5_equal():
    return LocalField(5, kind="equal_char")


@pytest.fixture(scope="session")
def q9_equal():
    return LocalField(3, f=2, kind="equal_char")


def norm_one_gamma(field, depth):
    """gamma = xi / conj(xi) for xi = 1 + w^depth sqrt(u): an exactly
    norm-one element with v(gamma^2 - 1) = depth."""
    xi = QuadExtElement(field.one(), field.uniformizer(depth))
    return xi * xi.conjugate().inverse()
