import pytest

from tcmicro import SynthConfig, synth_generate

# Fixed seeds for the surrogate data sets used across the suite.
MCD_SEED = 23
HCD_SEED = 37


@pytest.fixture(scope="session")
def mcd_table():
    """Moderately correlated surrogate: 1080 records, 2 QIs, rho 0.52."""
    return synth_generate(SynthConfig(n=1080, qi_count=2, target_correlation=0.52, seed=MCD_SEED))


@pytest.fixture(scope="session")
def hcd_table():
    """Highly correlated surrogate: 1080 records, 2 QIs, rho 0.92."""
    return synth_generate(SynthConfig(n=1080, qi_count=2, target_correlation=0.92, seed=HCD_SEED))
