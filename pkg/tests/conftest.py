from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from supergrass.algebra import GrassmannElement, monomial_masks

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

coefficients = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def elements(dim: int, parity: int | None = None, max_size: int | None = None):
    masks = monomial_masks(dim, parity)
    return st.dictionaries(st.sampled_from(masks), coefficients, max_size=max_size or len(masks)).map(
        lambda d: GrassmannElement(dim, d)
    )


def even_invertible(dim: int):
    return st.tuples(st.sampled_from([Fraction(1), Fraction(4), Fraction(1, 4), Fraction(9)]), elements(dim, 0)).map(
        lambda t: t[1].soul + t[0]
    )


seeds = st.integers(min_value=0, max_value=2**31 - 1)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
