import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qpebench.hamiltonian import PauliString, PauliSum

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

H2_X = 0.16814576933537334
H2_Z = 1.1973374204075313


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def planted(rng, n: int = 4) -> PauliSum:
    """Random Hamiltonian whose terms all commute with 1-3 random commuting strings."""
    r = int(rng.integers(1, 4))
    gens: list[PauliString] = []
    while len(gens) < r:
        p = PauliString("".join(rng.choice(list("IXYZ"), n)))
        if not p.is_identity and all(p.commutes(g) for g in gens):
            gens.append(p)
    terms = {}
    for _ in range(400):
        p = PauliString("".join(rng.choice(list("IXYZ"), n)))
        if not p.is_identity and all(p.commutes(g) for g in gens):
            terms[p.ops] = rng.normal()
        if len(terms) == 12:
            break
    return PauliSum.from_dict(n, terms, rng.normal())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
