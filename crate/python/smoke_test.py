#!/usr/bin/env python3
"""Builds the extension module and exercises the Python API end to end."""

import math
import random
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent


def build_module() -> None:
    subprocess.run(
        [
            "cargo",
            "build",
            "-p",
            "asplund-py",
            "--release",
            "--features",
            "extension-module",
        ],
        cwd=ROOT,
        check=True,
    )
    shutil.copyfile(
        ROOT / "target" / "release" / "libasplund_py.so",
        HERE / "asplund_py.so",
    )


def main() -> None:
    build_module()
    sys.path.insert(0, str(HERE))
    import asplund_py as ap

    # Grey-tone arithmetic: multiplication by 1 is the identity, and the
    # inversion between file and working conventions is an involution.
    f = ap.Image(3, 1, [10.0, 20.0, 30.0])
    assert ap.lip_scalar_mul(1.0, f).values() == f.values()
    assert ap.invert_convention(ap.invert_convention(f)).values() == f.values()
    doubled = ap.lip_add(f, f)
    assert all(
        math.isclose(got, 2 * v - v * v / 256.0)
        for got, v in zip(doubled.values(), f.values())
    )

    # Worked example: row [10, 20, 30] against a flat 3x1 probe has exactly
    # one valid pixel, and its score is known to the last bit.
    row = ap.flat_distance_map(f, 128.0, [(-1, 0), (0, 0), (1, 0)])
    assert row.valid() == [False, True, False]
    assert math.isclose(row.get(1, 0), 1.1404294714608763, rel_tol=0, abs_tol=1e-12)

    # The flat level cancels.
    other = ap.flat_distance_map(f, 40.0, [(-1, 0), (0, 0), (1, 0)])
    assert math.isclose(row.get(1, 0), other.get(1, 0), rel_tol=0, abs_tol=1e-12)

    # A grey-scale multiple is distance zero from the original.
    g = ap.Image(2, 2, [10.0, 60.0, 120.0, 200.0])
    assert abs(ap.asplund_distance(g, ap.lip_scalar_mul(1.7, g))) < 1e-12

    # Matching round trip: plant a probe, darken the scene, add noise, map
    # with tolerance, detect. The probe values form a geometric ladder in
    # log space, shuffled so that no translate of the probe lines up with
    # itself and scores as a spurious match.
    offsets = [(dx, dy) for dy in (-2, -1, 0, 1, 2) for dx in (-2, -1, 0, 1, 2)]
    rungs = [256.0 * (1.0 - math.exp(-0.17 * (2.5 / 0.17) ** (i / 24.0))) for i in range(25)]
    random.Random(7).shuffle(rungs)
    probe = ap.Probe(offsets, rungs)
    assert len(probe) == 25 and not probe.is_flat()

    scene = ap.synthesize_scene(64, 64, 128.0, probe, [((20, 24), 1.6), ((45, 40), 0.9)])
    darkened = ap.lip_scalar_mul(0.3, scene)
    noisy = ap.add_uniform_noise(darkened, 2.0, seed=11)
    dmap = ap.distance_map(noisy, probe, tolerance=0.3)
    assert dmap.tolerance == 0.3
    found = ap.detect(dmap, 0.7)
    anchors = sorted((d.x, d.y) for d in found)
    assert anchors == [(20, 24), (45, 40)], anchors
    assert all(d.score < 0.7 for d in found)

    # File round trips: PGM images, probe text, PFM maps.
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        ints = ap.Image(7, 5, [float((3 * i) % 256) for i in range(35)])
        ap.write_pgm(ints, tmp / "img.pgm")
        assert ap.read_pgm(tmp / "img.pgm").values() == ints.values()

        ap.write_probe(tmp / "probe.txt", (20, 24), probe)
        anchor, back = ap.read_probe(tmp / "probe.txt")
        assert anchor == (20, 24)
        assert back.offsets == probe.offsets and back.values == probe.values

        ap.write_map(dmap, tmp / "map.pfm", viz=tmp / "viz.pgm")
        reread = ap.read_map(tmp / "map.pfm")
        assert reread.valid() == dmap.valid()
        assert all(
            (not ok) or math.isclose(a, b, rel_tol=1e-6)
            for a, b, ok in zip(reread.values(), dmap.values(), dmap.valid())
        )
        assert (tmp / "viz.pgm").exists()
        assert (tmp / "map.pfm.mask.pgm").exists()

    # Errors surface as Python exceptions.
    try:
        ap.distance_map(g, probe, tolerance=0.6)
    except ValueError:
        pass
    else:
        raise AssertionError("tolerance 0.6 should be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
