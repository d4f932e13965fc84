"""Smoke test for the quartic extension module.

Build first:  cargo build --release -p quartic-py
Run:          python3 python/smoke_test.py
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for name in ("libquartic.so", "libquartic.dylib", "quartic.dll"):
        lib = ROOT / "target" / "release" / name
        if lib.exists():
            break
    else:
        sys.exit("extension not built: run `cargo build --release -p quartic-py`")
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    dest = pathlib.Path(tempfile.mkdtemp()) / f"quartic{suffix}"
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("quartic", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    q = load()

    assert q.count_row_sums([6, 6, 6, 7, 7]) == 795
    assert q.count_row_sums([12, 13, 13, 13, 13]) == 13818

    a = q.asymptotic_count([8] * 7)
    assert abs(a["lambda"] - 4 / 3) < 1e-12

    d = q.DiagonalSpec([0.8, 0.6, 0.4, 0.3])
    est, se = d.mc_volume(200_000)
    assert abs(d.exact_volume() - est) < 3 * se
    assert d.mc_volume(10_000) == d.mc_volume(10_000)

    t = q.QuarticTable(10)
    assert abs(t.r[0] - math.gamma(0.75) / math.gamma(0.25)) < 1e-14
    assert abs(t.r[9] - 0.9132) < 5e-5
    assert t.band_violations() == [2]

    s = q.KineticSpectrum([1.0, 1.1, 1.2])
    assert abs(s.z_free() - 14.142) < 1e-3
    z, zse = s.z_mc_matrix(200_000)
    assert abs(z / s.z_free() - 1) < 0.03

    assert abs(q.hciz([0.0, 1.0], [0.0, 1.0], 1.0) - (math.e - 1)) < 1e-12
    assert abs(q.z_zero_kinetic(1, 1.0) - math.gamma(0.25) / 2) < 1e-14

    direct, saddle, ratio = q.pearcey(-24.0, 14.0, 0)
    assert abs(direct.real / 1.01e-5 - 1) < 0.02
    assert abs(ratio - 1.03) < 0.01

    _, _, rel = q.gamma_quarter_det(4)
    assert rel < 1e-8

    results = q.run_verify("utilities")
    assert results and all(r[2] for r in results)

    for bad in (lambda: q.DiagonalSpec([]), lambda: q.KineticSpectrum([1.0, -1.0])):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
