from pathlib import Path

import pytest

from mecsim.trajectory import BaseStationGeom

DATA_DIR = Path(__file__).parent / "data"
VED_SAMPLE = DATA_DIR / "ved_sample.csv"

# Station the bundled trips orbit; radius at the low end of a macro cell.
SAMPLE_BS = BaseStationGeom(lat_deg=42.2770, lon_deg=-83.7382, radius_m=3000.0)


@pytest.fixture
def ved_sample_path():
    return VED_SAMPLE


@pytest.fixture
def sample_bs():
    return SAMPLE_BS
