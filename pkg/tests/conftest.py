import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the reference module

from fermilat import KGrid, ModelParams, block_entropy, build_correlator_table
from fermilat import block_matrices, mode_spectrum


@pytest.fixture(scope="session")
def metal_table_d2():
    """Correlator table for the d = 2 metal at lambda = 0.5, N = 256."""
    return build_correlator_table(ModelParams(0.5, 0.0, 2), KGrid(n_per_dim=256))


@pytest.fixture(scope="session")
def metal_series_d2(metal_table_d2):
    """(L, S_bits) pairs for L = 6 .. 32 from the shared metal table."""
    out = []
    for block_l in range(6, 33, 2):
        bc = block_matrices(metal_table_d2, block_l)
        out.append((block_l, block_entropy(mode_spectrum(bc)).entropy_bits))
    return out
