import pytest

from diagcount.instance import ProblemInstance


@pytest.fixture(scope="session")
def inst_a():
    """Bilinear three-term system: x1*y1 + x2*y2 - x3*y3 = 0."""
    return ProblemInstance(degree=1, factors=2, equations=1, terms=3,
                           coeffs=((1, 1, -1),), moment_threshold=2)


@pytest.fixture(scope="session")
def inst_b():
    """Five-squares system: three squares equal two squares."""
    return ProblemInstance(degree=2, factors=1, equations=1, terms=5,
                           coeffs=((1, 1, 1, -1, -1),), moment_threshold=4)


@pytest.fixture(scope="session")
def inst_c2():
    """Two simultaneous linear equations in six terms."""
    return ProblemInstance(degree=1, factors=1, equations=2, terms=6,
                           coeffs=((1, 1, 1, -1, -1, -1),
                                   (1, 2, 3, -3, -2, -1)),
                           moment_threshold=2)


@pytest.fixture(scope="session")
def inst_zero():
    """Positive-definite: a sum of five squares, no nonzero solutions."""
    return ProblemInstance(degree=2, factors=1, equations=1, terms=5,
                           coeffs=((1, 1, 1, 1, 1),), moment_threshold=4)


@pytest.fixture(scope="session")
def inst_undet():
    """x^2 = 3 y^2: real solutions exist but 3-adic nonzero ones do not,
    and the search can only report that no witness was found."""
    return ProblemInstance(degree=2, factors=1, equations=1, terms=2,
                           coeffs=((1, -3),), moment_threshold=4)


@pytest.fixture(scope="session")
def inst_d():
    """Two-factor variant of the five-squares system; slicing one factor
    row at norm 1 reduces every member to the one-factor system."""
    return ProblemInstance(degree=2, factors=2, equations=1, terms=5,
                           coeffs=((1, 1, 1, -1, -1),), moment_threshold=4)
