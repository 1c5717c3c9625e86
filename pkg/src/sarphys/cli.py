"""Command-line pipelines: simulate -> focus -> feature products.

Subcommands: simulate, focus, sublook, spectrogram, pauli, halpha, poa,
psdfix, cluster.  Exit codes are a stable contract: 0 success, 2 input or
validation error, 3 physics-bound violation, 64 usage error.  Every output
artifact gets a sidecar recording the full command line and the checksums
of its inputs; reruns on identical inputs produce identical payloads
(--threads never changes results).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .core import (
    FormatError,
    PhysicsBoundError,
    QuadPolImage,
    SarError,
    SlcImage,
    ValidationError,
    read_slc,
    write_slc,
)
from .echosim import migration_check, read_raw, write_raw
from .focus import azimuth_compress, measure_response, range_compress
from .physclust import build_features, kmeans
from .polarimetry import coherency, h_alpha, orientation_angle, pauli_rgb, psd_project
from .products import (
    complex_to_planes,
    planes_to_complex,
    read_tensor,
    sha256_file,
    write_png_rgb,
    write_tensor,
)
from .scene import load_scene, simulate_scene
from .sublook import estimate_doppler_centroid, sublook_decompose, sublook_rgb
from .timefreq import Spectrogram, spectrogram
from . import core

log = logging.getLogger("sarphys")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PHYSICS = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pair(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'A,R' pair, got {text!r}")
    return (int(parts[0]), int(parts[1]))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sarphys", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sarphys {__version__}")
    parser.add_argument(
        "--threads",
        type=int,
        default=0,
        help="worker threads, 0 = auto; results are bit-identical regardless",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="render a scene file to raw echoes")
    p.add_argument("scene", help="scene JSON file")
    p.add_argument("out", help="output raw file (SLC1 container, product 'raw')")

    p = sub.add_parser("focus", help="matched-filter focusing of raw echoes")
    p.add_argument("raw", help="input raw file")
    p.add_argument("out", help="output SLC file")
    p.add_argument("--window", default="rect", choices=("rect", "hann", "hamming"))
    p.add_argument("--report", action="store_true", help="print a FocusReport for the brightest point")

    p = sub.add_parser("sublook", help="Doppler sub-look decomposition")
    p.add_argument("slc", help="input SLC file")
    p.add_argument("--looks", type=int, default=3)
    p.add_argument("--centroid", default="auto", help="'auto' or a Doppler centroid in Hz")
    p.add_argument("--rgb", default=None, help="write an RGB composite PNG (requires --looks 3)")
    p.add_argument("--out-prefix", default=None, help="prefix for look SLC files (default: input stem)")

    p = sub.add_parser("spectrogram", help="sub-band energy signature of a patch")
    p.add_argument("slc", help="input SLC file")
    p.add_argument("out", help="output f32 tensor")
    p.add_argument("--origin", type=_pair, required=True, help="patch origin 'AZ,RG'")
    p.add_argument("--size", type=_pair, default=(64, 64), help="patch size 'AZ,RG'")
    p.add_argument("--rbands", type=int, default=3)
    p.add_argument("--abands", type=int, default=3)
    p.add_argument("--overlap", action="store_true",
                   help="Hann-weighted 50%%-overlap bands (display mode)")

    for name, help_text in (
        ("pauli", "Pauli power channels from a quad-pol stack"),
        ("halpha", "entropy / anisotropy / alpha / zone maps"),
        ("poa", "polarization orientation angle map"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("out", help="output f32 tensor")
        p.add_argument("--hh", required=True)
        p.add_argument("--hv", required=True)
        p.add_argument("--vh", required=True)
        p.add_argument("--vv", required=True)
        if name == "pauli":
            p.add_argument("--png", default=None, help="write the display composite PNG")
        else:
            p.add_argument("--window", type=_pair, default=(1, 1), help="look window 'AZ,RG' (odd)")
        if name == "halpha":
            p.add_argument("--save-coherency", default=None, help="also write the coherency tensor")

    p = sub.add_parser("psdfix", help="project coherency matrices onto the PSD cone")
    p.add_argument("coherency", help="input coherency tensor (shape ..,3,3,2)")
    p.add_argument("out", help="output coherency tensor")

    p = sub.add_parser("cluster", help="k-means over spectrogram features")
    p.add_argument("spectrograms", nargs="+", help="spectrogram tensor files")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--assignments", required=True, help="output text file, one cluster id per line")
    p.add_argument("--centroids", required=True, help="output f32 tensor of centroids")

    return parser


def _provenance(argv, inputs) -> dict:
    return {
        "command": "sarphys " + " ".join(argv),
        "inputs": {path: sha256_file(path) for path in inputs},
    }


def _print(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_simulate(args, argv) -> int:
    scene = load_scene(args.scene)
    raw = simulate_scene(scene)
    mig = migration_check(scene.targets, scene.sensor, scene.extent)
    write_raw(raw, args.out, extra=_provenance(argv, [args.scene]))
    _print({"migration_cells": mig, "shape": list(raw.samples.shape)})
    return EXIT_OK


def cmd_focus(args, argv) -> int:
    raw = read_raw(args.raw)
    slc = azimuth_compress(range_compress(raw, args.window), args.window)
    write_slc(slc, args.out, extra=_provenance(argv, [args.raw]))
    if args.report:
        peak = np.unravel_index(int(np.argmax(np.abs(slc.samples))), slc.samples.shape)
        report = measure_response(slc, peak)
        _print(report.to_dict())
    return EXIT_OK


def cmd_sublook(args, argv) -> int:
    slc = read_slc(args.slc)
    if args.centroid == "auto":
        centroid = estimate_doppler_centroid(slc)
    else:
        try:
            centroid = float(args.centroid)
        except ValueError:
            raise ValidationError(f"--centroid must be 'auto' or a number, got {args.centroid!r}")
    stack = sublook_decompose(slc, args.looks, centroid)
    prov = _provenance(argv, [args.slc])
    prefix = args.out_prefix or args.slc.removesuffix(".slc")
    for i, look in enumerate(stack.looks):
        extra = dict(prov)
        extra.update(
            {
                "product": "sublook",
                "look_index": i + 1,
                "band_lo_hz": float(stack.band_edges_hz[i]),
                "band_hi_hz": float(stack.band_edges_hz[i + 1]),
                "centroid_hz": stack.centroid_hz,
            }
        )
        write_slc(SlcImage.from_params(look, slc.params), f"{prefix}_look{i + 1}.slc", extra=extra)
    if args.rgb:
        write_png_rgb(args.rgb, sublook_rgb(stack))
        core.write_sidecar(args.rgb + ".meta", prov)
    _print({"centroid_hz": stack.centroid_hz, "band_edges_hz": [float(e) for e in stack.band_edges_hz]})
    return EXIT_OK


def cmd_spectrogram(args, argv) -> int:
    slc = read_slc(args.slc)
    spec = spectrogram(slc, args.origin, args.size, args.rbands, args.abands, args.overlap)
    extra = _provenance(argv, [args.slc])
    extra.update(
        {
            "product": "spectrogram",
            "range_band_centers_hz": [float(f) for f in spec.range_band_centers_hz],
            "azimuth_band_centers_hz": [float(f) for f in spec.azimuth_band_centers_hz],
            "patch_origin": list(spec.patch_origin),
            "patch_size": list(spec.patch_size),
        }
    )
    write_tensor(args.out, spec.energies, extra=extra)
    return EXIT_OK


def _read_quadpol(args) -> QuadPolImage:
    return QuadPolImage(
        read_slc(args.hh), read_slc(args.hv), read_slc(args.vh), read_slc(args.vv)
    )


def cmd_pauli(args, argv) -> int:
    qp = _read_quadpol(args)
    pauli = pauli_rgb(qp)
    prov = _provenance(argv, [args.hh, args.hv, args.vh, args.vv])
    extra = dict(prov)
    extra.update({"product": "pauli", "channels": ["even_bounce", "cross_pol", "odd_bounce"]})
    write_tensor(args.out, pauli.power, extra=extra)
    if args.png:
        write_png_rgb(args.png, pauli.display)
        core.write_sidecar(args.png + ".meta", prov)
    return EXIT_OK


def cmd_halpha(args, argv) -> int:
    qp = _read_quadpol(args)
    cov = coherency(qp, args.window)
    ha = h_alpha(cov)
    prov = _provenance(argv, [args.hh, args.hv, args.vh, args.vv])
    planes = np.stack([ha.entropy, ha.anisotropy, ha.alpha_deg, ha.zone.astype(np.float64)], axis=-1)
    extra = dict(prov)
    extra.update(
        {
            "product": "halpha",
            "channels": ["entropy", "anisotropy", "alpha_deg", "zone"],
            "look_window": list(cov.look_window),
        }
    )
    write_tensor(args.out, planes, extra=extra)
    if args.save_coherency:
        extra = dict(prov)
        extra.update({"product": "coherency", "look_window": list(cov.look_window)})
        write_tensor(args.save_coherency, complex_to_planes(cov.t), extra=extra)
    return EXIT_OK


def cmd_poa(args, argv) -> int:
    qp = _read_quadpol(args)
    theta = orientation_angle(coherency(qp, args.window))
    extra = _provenance(argv, [args.hh, args.hv, args.vh, args.vv])
    extra.update({"product": "poa_deg", "look_window": list(args.window)})
    write_tensor(args.out, theta, extra=extra)
    return EXIT_OK


def cmd_psdfix(args, argv) -> int:
    arr, meta = read_tensor(args.coherency)
    t = planes_to_complex(arr)
    if t.ndim < 2 or t.shape[-2:] != (3, 3):
        raise ValidationError(f"coherency tensor must end in (3, 3, 2), got shape {arr.shape}")
    fixed = psd_project(t)
    extra = _provenance(argv, [args.coherency])
    extra.update({"product": "coherency", "look_window": meta.get("look_window", [1, 1])})
    write_tensor(args.out, complex_to_planes(fixed), extra=extra)
    return EXIT_OK


def cmd_cluster(args, argv) -> int:
    specs = []
    for path in args.spectrograms:
        arr, meta = read_tensor(path)
        if meta.get("product") != "spectrogram":
            raise ValidationError(f"{path} is not a spectrogram tensor")
        specs.append(
            Spectrogram(
                arr.astype(np.float64),
                np.asarray(meta["range_band_centers_hz"], dtype=float),
                np.asarray(meta["azimuth_band_centers_hz"], dtype=float),
                tuple(meta.get("patch_origin", (0, 0))),
                tuple(meta.get("patch_size", arr.shape)),
            )
        )
    feats = build_features(specs)
    model = kmeans(feats, args.k, args.seed, args.max_iter)
    prov = _provenance(argv, args.spectrograms)
    with open(args.assignments, "w", encoding="utf-8") as f:
        for a in model.assignments:
            f.write(f"{int(a)}\n")
    core.write_sidecar(args.assignments + ".meta", dict(prov, product="assignments"))
    extra = dict(prov)
    extra.update({"product": "centroids", "k": model.k, "seed": model.seed, "inertia": model.inertia})
    write_tensor(args.centroids, model.centroids, extra=extra)
    _print({"k": model.k, "inertia": model.inertia})
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "focus": cmd_focus,
    "sublook": cmd_sublook,
    "spectrogram": cmd_spectrogram,
    "pauli": cmd_pauli,
    "halpha": cmd_halpha,
    "poa": cmd_poa,
    "psdfix": cmd_psdfix,
    "cluster": cmd_cluster,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.threads < 0:
        print(f"sarphys: error: --threads must be >= 0, got {args.threads}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, argv)
    except PhysicsBoundError as e:
        print(f"sarphys: physics bound violated: {e}", file=sys.stderr)
        return EXIT_PHYSICS
    except (ValidationError, FormatError) as e:
        print(f"sarphys: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SarError as e:
        print(f"sarphys: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"sarphys: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
