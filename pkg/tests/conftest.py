import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from msgc import VarModel, bi_config, build_benchmark, mix_config, uni_config


@pytest.fixture(scope="session")
def uni_model():
    return build_benchmark(uni_config())


@pytest.fixture(scope="session")
def bi_model():
    return build_benchmark(bi_config())


@pytest.fixture(scope="session")
def mix_model():
    return build_benchmark(mix_config())


@pytest.fixture(scope="session")
def ar1_pair():
    """Two independent AR(1) channels."""
    return VarModel(np.array([[[0.5, 0.0], [0.0, 0.7]]]), np.eye(2))
