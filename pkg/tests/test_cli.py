import json
import os

import numpy as np
import pytest

from sarphys import read_slc
from sarphys.cli import main
from sarphys.products import read_tensor, sha256_file

from conftest import FAST
from util import expected_pixel

FAST_SENSOR = FAST.to_dict()


def write_scene(path, targets, noise_sigma=0.0, seed=0, sensor=None, extent=(20.0, 90.0)):
    doc = {
        "sensor": sensor or FAST_SENSOR,
        "extent": {"range_window_m": extent[0], "azimuth_window_m": extent[1]},
        "targets": targets,
        "noise_sigma": noise_sigma,
        "seed": seed,
    }
    with open(path, "w") as f:
        json.dump(doc, f)
    return str(path)


def point(refl=(1.0, 0.0), r=None, a=0.0, anis=None):
    t = {
        "type": "point",
        "slant_range_m": r if r is not None else FAST_SENSOR["center_slant_range_m"],
        "azimuth_m": a,
        "reflectivity": list(refl),
    }
    if anis:
        t["anisotropy"] = anis
    return t


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(*argv):
    return main(list(argv))


def simulate_and_focus(workdir, name="a", targets=None, **scene_kw):
    scene = write_scene(workdir / f"{name}.json", targets or [point()], **scene_kw)
    assert run("simulate", scene, f"{name}.raw") == 0
    assert run("focus", f"{name}.raw", f"{name}.slc") == 0
    return f"{name}.slc"


class TestExitCodes:
    def test_unknown_flag_64(self, workdir, capsys):
        assert run("focus", "--nope", "a", "b") == 64
        assert "usage" in capsys.readouterr().err

    def test_unknown_command_64(self, workdir):
        assert run("transmogrify") == 64

    def test_missing_args_64(self, workdir):
        assert run("simulate") == 64

    def test_negative_threads_64(self, workdir):
        scene = write_scene(workdir / "s.json", [point()])
        assert run("--threads", "-1", "simulate", scene, "out.raw") == 64

    def test_out_of_extent_2(self, workdir, capsys):
        scene = write_scene(workdir / "s.json", [point(a=80.0)])
        assert run("simulate", scene, "out.raw") == 2
        assert "target outside extent" in capsys.readouterr().err

    def test_invalid_sensor_2(self, workdir, capsys):
        bad = dict(FAST_SENSOR, prf_hz=-5.0)
        scene = write_scene(workdir / "s.json", [point()], sensor=bad)
        assert run("simulate", scene, "out.raw") == 2
        assert "invalid SensorParams" in capsys.readouterr().err

    def test_migration_bound_3(self, workdir, capsys):
        fast_bad = dict(FAST_SENSOR, antenna_length_m=0.2, prf_hz=1800.0)
        scene = write_scene(workdir / "s.json", [point()], sensor=fast_bad)
        assert run("simulate", scene, "out.raw") == 3
        assert "migration" in capsys.readouterr().err

    def test_corrupt_focus_input_2(self, workdir):
        with open("junk.raw", "wb") as f:
            f.write(b"garbage")
        assert run("focus", "junk.raw", "out.slc") == 2

    def test_missing_input_2(self, workdir):
        assert run("focus", "missing.raw", "out.slc") == 2


class TestSimulate:
    def test_prints_migration_and_reruns_identical(self, workdir, capsys):
        scene = write_scene(workdir / "s.json", [point()])
        assert run("simulate", scene, "a.raw") == 0
        out = json.loads(capsys.readouterr().out)
        assert 0 < out["migration_cells"] <= 0.5
        assert run("simulate", scene, "b.raw") == 0
        assert sha256_file("a.raw") == sha256_file("b.raw")

    def test_noise_seed_changes_payload(self, workdir):
        s1 = write_scene(workdir / "s1.json", [point()], noise_sigma=0.1, seed=1)
        s2 = write_scene(workdir / "s2.json", [point()], noise_sigma=0.1, seed=2)
        run("simulate", s1, "n1.raw")
        run("simulate", s2, "n2.raw")
        assert sha256_file("n1.raw") != sha256_file("n2.raw")

    def test_provenance_sidecar(self, workdir):
        scene = write_scene(workdir / "s.json", [point()])
        run("simulate", scene, "a.raw")
        meta = json.load(open("a.raw.meta"))
        assert meta["product"] == "raw"
        assert meta["inputs"][scene] == sha256_file(scene)
        assert "simulate" in meta["command"]


class TestFocusCommand:
    def test_report_printed(self, workdir, capsys):
        scene = write_scene(workdir / "s.json", [point()])
        run("simulate", scene, "a.raw")
        assert run("focus", "a.raw", "a.slc", "--report") == 0
        report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert report["pslr_db"] < 0
        assert report["range_irw_m"] > 0
        assert os.path.exists("a.slc.meta")

    def test_hann_wider_than_rect(self, workdir, capsys):
        scene = write_scene(workdir / "s.json", [point()])
        run("simulate", scene, "a.raw")
        run("focus", "a.raw", "rect.slc", "--report")
        rect = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        run("focus", "a.raw", "hann.slc", "--window", "hann", "--report")
        hann = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert hann["range_irw_m"] > rect["range_irw_m"]
        assert hann["azimuth_irw_m"] > rect["azimuth_irw_m"]


class TestSublookCommand:
    def test_png_and_look_files(self, workdir):
        slc = simulate_and_focus(workdir)
        assert run("sublook", slc, "--looks", "3", "--rgb", "looks.png") == 0
        for i in (1, 2, 3):
            look = read_slc(f"a_look{i}.slc")
            assert look.samples.shape == read_slc(slc).samples.shape
            meta = json.load(open(f"a_look{i}.slc.meta"))
            assert meta["product"] == "sublook"
            assert meta["band_lo_hz"] < meta["band_hi_hz"]
        assert os.path.getsize("looks.png") > 0
        assert json.load(open("looks.png.meta"))["inputs"]

    def test_explicit_centroid(self, workdir):
        slc = simulate_and_focus(workdir)
        assert run("sublook", slc, "--centroid", "12.5", "--out-prefix", "c") == 0
        assert json.load(open("c_look1.slc.meta"))["centroid_hz"] == pytest.approx(12.5, abs=1.0)

    def test_bad_centroid_2(self, workdir):
        slc = simulate_and_focus(workdir)
        assert run("sublook", slc, "--centroid", "fast") == 2


class TestSpectrogramCommand:
    def test_tensor_with_band_centers(self, workdir):
        slc = simulate_and_focus(workdir)
        from sarphys import SceneExtent

        row, col = expected_pixel(FAST, SceneExtent(20.0, 90.0), FAST.center_slant_range_m, 0.0)
        assert run(
            "spectrogram", slc, "spec.f32",
            "--origin", f"{row - 24},{col - 24}", "--size", "48,48",
            "--rbands", "4", "--abands", "3",
        ) == 0
        arr, meta = read_tensor("spec.f32")
        assert arr.shape == (4, 3)
        assert len(meta["range_band_centers_hz"]) == 4
        assert len(meta["azimuth_band_centers_hz"]) == 3
        assert (arr >= 0).all()

    def test_out_of_bounds_2(self, workdir):
        slc = simulate_and_focus(workdir)
        assert run("spectrogram", slc, "spec.f32", "--origin", "900,0") == 2


def simulate_quadpol(workdir, hh, hv, vh, vv, prefix="q"):
    paths = {}
    for name, refl in (("hh", hh), ("hv", hv), ("vh", vh), ("vv", vv)):
        targets = [point(refl=refl)] if refl != (0.0, 0.0) else []
        scene = write_scene(workdir / f"{prefix}_{name}.json", targets)
        run("simulate", scene, f"{prefix}_{name}.raw")
        run("focus", f"{prefix}_{name}.raw", f"{prefix}_{name}.slc")
        paths[name] = f"{prefix}_{name}.slc"
    return paths


class TestPolarimetricCommands:
    def test_pauli_surface(self, workdir):
        p = simulate_quadpol(workdir, (1, 0), (0, 0), (0, 0), (1, 0))
        assert run(
            "pauli", "pauli.f32", "--hh", p["hh"], "--hv", p["hv"],
            "--vh", p["vh"], "--vv", p["vv"], "--png", "pauli.png",
        ) == 0
        arr, meta = read_tensor("pauli.f32")
        peak = np.unravel_index(int(np.argmax(arr[..., 2])), arr.shape[:2])
        r, g, b = arr[peak]
        assert b > 100 * max(r, g)  # odd-bounce dominated
        assert os.path.getsize("pauli.png") > 0

    def test_halpha_zone_constant_on_surface(self, workdir):
        p = simulate_quadpol(workdir, (1, 0), (0, 0), (0, 0), (1, 0))
        assert run(
            "halpha", "ha.f32", "--hh", p["hh"], "--hv", p["hv"],
            "--vh", p["vh"], "--vv", p["vv"], "--window", "3,3",
            "--save-coherency", "t3.f32",
        ) == 0
        arr, meta = read_tensor("ha.f32")
        zones = arr[..., 3]
        assert (zones == 9.0).all()  # surface everywhere, zone 9 incl. no-return
        assert meta["channels"] == ["entropy", "anisotropy", "alpha_deg", "zone"]
        t3, _ = read_tensor("t3.f32")
        assert t3.shape[-3:] == (3, 3, 2)

    def test_poa_recovers_rotation(self, workdir):
        theta = 20.0
        c2 = float(np.cos(np.radians(2 * theta)))
        s2 = float(np.sin(np.radians(2 * theta)))
        p = simulate_quadpol(workdir, (c2, 0), (s2, 0), (s2, 0), (-c2, 0))
        assert run(
            "poa", "poa.f32", "--hh", p["hh"], "--hv", p["hv"],
            "--vh", p["vh"], "--vv", p["vv"],
        ) == 0
        arr, _ = read_tensor("poa.f32")
        mag = np.abs(read_slc(p["hh"]).samples)
        peak = np.unravel_index(int(np.argmax(mag)), mag.shape)
        assert arr[peak] == pytest.approx(theta, abs=0.5)

    def test_psdfix_stable_on_psd_input(self, workdir):
        p = simulate_quadpol(workdir, (1, 0), (0.3, 0.1), (0.3, 0.1), (0.8, 0.2))
        run(
            "halpha", "ha.f32", "--hh", p["hh"], "--hv", p["hv"],
            "--vh", p["vh"], "--vv", p["vv"], "--window", "3,3",
            "--save-coherency", "t3.f32",
        )
        assert run("psdfix", "t3.f32", "fixed.f32") == 0
        a, _ = read_tensor("t3.f32")
        b, _ = read_tensor("fixed.f32")
        scale = np.abs(a).max()
        assert np.allclose(a, b, atol=2e-6 * scale)
        # a second application is byte-stable
        assert run("psdfix", "fixed.f32", "fixed2.f32") == 0
        assert np.allclose(*[read_tensor(f)[0] for f in ("fixed.f32", "fixed2.f32")],
                           atol=2e-6 * scale)


class TestClusterCommand:
    def test_assignments_and_determinism(self, workdir):
        slc = simulate_and_focus(workdir)
        files = []
        for i, origin in enumerate([(36, 104), (30, 110), (40, 100), (36, 108)]):
            out = f"s{i}.f32"
            assert run(
                "spectrogram", slc, out, "--origin", f"{origin[0]},{origin[1]}",
                "--size", "48,48", "--rbands", "3", "--abands", "3",
            ) == 0
            files.append(out)
        assert run(
            "cluster", *files, "--k", "2", "--seed", "11",
            "--assignments", "assign.txt", "--centroids", "cent.f32",
        ) == 0
        labels = open("assign.txt").read().split()
        assert len(labels) == 4
        assert set(labels) <= {"0", "1"}
        c1 = sha256_file("cent.f32")
        run(
            "cluster", *files, "--k", "2", "--seed", "11",
            "--assignments", "assign2.txt", "--centroids", "cent2.f32",
        )
        assert sha256_file("cent2.f32") == c1
        assert open("assign2.txt").read() == open("assign.txt").read()


class TestReproducibility:
    def test_threads_flag_never_changes_payloads(self, workdir):
        scene = write_scene(workdir / "s.json", [point()], noise_sigma=0.05, seed=3)
        run("--threads", "1", "simulate", scene, "t1.raw")
        run("--threads", "8", "simulate", scene, "t8.raw")
        assert sha256_file("t1.raw") == sha256_file("t8.raw")
        run("--threads", "1", "focus", "t1.raw", "t1.slc")
        run("--threads", "8", "focus", "t8.raw", "t8.slc")
        assert sha256_file("t1.slc") == sha256_file("t8.slc")
