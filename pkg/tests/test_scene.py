import json

import numpy as np
import pytest

from sarphys import FormatError, MultipathTarget, ValidationError
from sarphys.scene import SceneSpec, load_scene, simulate_scene

from conftest import FAST, FAST_EXTENT

REPO_SCENES = ("scenes/demo_point.json", "scenes/demo_bridge.json")


@pytest.mark.parametrize("path", REPO_SCENES)
def test_shipped_scenes_load(path):
    import os

    scene = load_scene(os.path.join(os.path.dirname(__file__), "..", path))
    assert scene.targets


def test_missing_key(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"sensor": FAST.to_dict()}))
    with pytest.raises(FormatError, match="missing key"):
        load_scene(str(p))


def test_unknown_target_type(tmp_path):
    doc = {
        "sensor": FAST.to_dict(),
        "extent": {"range_window_m": 20.0, "azimuth_window_m": 90.0},
        "targets": [{"type": "blob"}],
    }
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match="unknown target type"):
        load_scene(str(p))


def test_bad_reflectivity(tmp_path):
    doc = {
        "sensor": FAST.to_dict(),
        "extent": {"range_window_m": 20.0, "azimuth_window_m": 90.0},
        "targets": [
            {"type": "point", "slant_range_m": 5e3, "azimuth_m": 0.0, "reflectivity": "big"}
        ],
    }
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match="reflectivity|pair"):
        load_scene(str(p))


def test_negative_noise_rejected():
    with pytest.raises(ValidationError, match="noise_sigma"):
        SceneSpec(FAST, FAST_EXTENT, (), noise_sigma=-0.5)


def test_noise_is_seed_deterministic():
    a = simulate_scene(SceneSpec(FAST, FAST_EXTENT, (), noise_sigma=0.3, seed=9))
    b = simulate_scene(SceneSpec(FAST, FAST_EXTENT, (), noise_sigma=0.3, seed=9))
    c = simulate_scene(SceneSpec(FAST, FAST_EXTENT, (), noise_sigma=0.3, seed=10))
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_multipath_reflectivity_count():
    with pytest.raises(ValidationError, match="exactly 3"):
        MultipathTarget(5e3, 0.0, 10.0, (1.0, 0.5))
