import numpy as np
import pytest

from bodyauth.body_model import PathGeometry, Scene, derive_path_lengths
from bodyauth.cohort import subject_scene


@pytest.fixture
def simple_scene():
    from bodyauth.body_model import default_body_profile

    body = default_body_profile("alice")
    in_len, out_len = derive_path_lengths(body, 0.0)
    geometry = PathGeometry(l1_m=1.5, l2_m=1.5, offset_b_m=0.0,
                            in_lengths_m=in_len, out_lengths_m=out_len)
    return Scene(bodies=((body, geometry),), seed=7)


@pytest.fixture
def cohort_scene_pair():
    return subject_scene(0, seed=11), subject_scene(1, seed=12)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
