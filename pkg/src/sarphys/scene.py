"""Scene descriptions: hand-editable JSON fixtures driving the simulator.

Schema (all keys required unless noted):

    {
      "sensor": { ... all SensorParams fields ... },
      "extent": {"range_window_m": 80.0, "azimuth_window_m": 200.0},
      "targets": [
        {"type": "point", "slant_range_m": 10000.0, "azimuth_m": 0.0,
         "reflectivity": [1.0, 0.0],
         "anisotropy": {"axis": "doppler", "f_lo_hz": 30.0, "f_hi_hz": 90.0}},  # optional
        {"type": "multipath", "deck_slant_range_m": 10000.0, "azimuth_m": 0.0,
         "height_m": 20.0,
         "bounce_reflectivities": [[1.0, 0.0], [0.7, 0.0], [0.4, 0.0]]}
      ],
      "noise_sigma": 0.0,   # std of complex white circular Gaussian noise
      "seed": 0             # noise RNG seed
    }

Complex values are [real, imag] pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ComplexImage, FormatError, SensorParams, ValidationError, read_sidecar
from .echosim import BandLimit, MultipathTarget, PointTarget, RawData, SceneExtent, simulate_raw


@dataclass(frozen=True)
class SceneSpec:
    sensor: SensorParams
    extent: SceneExtent
    targets: tuple
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")


def _complex(value, context: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValidationError(f"{context}: expected a number or [real, imag] pair, got {value!r}")


def _parse_target(entry: dict, index: int):
    kind = entry.get("type")
    ctx = f"targets[{index}]"
    try:
        if kind == "point":
            anis = entry.get("anisotropy")
            band = None
            if anis is not None:
                band = BandLimit(anis["axis"], float(anis["f_lo_hz"]), float(anis["f_hi_hz"]))
            return PointTarget(
                float(entry["slant_range_m"]),
                float(entry["azimuth_m"]),
                _complex(entry["reflectivity"], ctx),
                band,
            )
        if kind == "multipath":
            refl = tuple(_complex(r, ctx) for r in entry["bounce_reflectivities"])
            return MultipathTarget(
                float(entry["deck_slant_range_m"]),
                float(entry["azimuth_m"]),
                float(entry["height_m"]),
                refl,
            )
    except KeyError as e:
        raise ValidationError(f"{ctx}: missing key {e.args[0]}") from None
    raise ValidationError(f"{ctx}: unknown target type {kind!r}")


def load_scene(path: str) -> SceneSpec:
    """Parse and fully re-validate a scene file."""
    doc = read_sidecar(path)  # same JSON reader, same error surface
    try:
        sensor = SensorParams.from_dict(doc["sensor"])
        extent = SceneExtent(
            float(doc["extent"]["range_window_m"]), float(doc["extent"]["azimuth_window_m"])
        )
        targets = tuple(_parse_target(t, i) for i, t in enumerate(doc.get("targets", [])))
        noise = float(doc.get("noise_sigma", 0.0))
        seed = int(doc.get("seed", 0))
    except KeyError as e:
        raise FormatError(f"scene file missing key {e.args[0]}") from None
    return SceneSpec(sensor, extent, targets, noise, seed)


def simulate_scene(scene: SceneSpec) -> RawData:
    """Run the echo simulator and add seeded circular Gaussian noise if requested."""
    raw = simulate_raw(scene.targets, scene.sensor, scene.extent)
    if scene.noise_sigma == 0:
        return raw
    rng = np.random.default_rng(scene.seed)
    shape = raw.samples.shape
    noise = (scene.noise_sigma / np.sqrt(2.0)) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
    return RawData(ComplexImage(raw.samples + noise), raw.params, raw.extent)
