import numpy as np
import pytest

from actcomp.tensor import ActivationMatrix, SynthSpec, generate_synthetic


@pytest.fixture
def smooth64():
    return generate_synthetic(64, 64, SynthSpec(mode_count=8, decay_exponent=2.0, noise_sigma=0.01, seed=42))


def random_matrix(S, D, seed=0) -> ActivationMatrix:
    return ActivationMatrix(np.random.default_rng(seed).standard_normal((S, D)))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
