"""Smoke test for the emcurve Python extension.

Build first with `cargo build -p emcurve-py` (add `--release` to test the
release artifact), then run `python3 python/smoke_test.py`.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys
from fractions import Fraction

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_extension():
    names = ["libemcurve_py.so", "libemcurve_py.dylib", "emcurve_py.dll"]
    candidates = [ROOT / "target" / profile / name for profile in ("release", "debug") for name in names]
    found = [p for p in candidates if p.exists()]
    if not found:
        sys.exit("extension not built; run `cargo build -p emcurve-py` first")
    path = max(found, key=lambda p: p.stat().st_mtime)
    loader = importlib.machinery.ExtensionFileLoader("emcurve", str(path))
    spec = importlib.util.spec_from_file_location("emcurve", str(path), loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    emcurve = load_extension()

    params = emcurve.FamilyParams(2, 3, 7, 11)
    curve = params.curve()
    assert (curve.b, curve.c) == (-4, 53361), curve
    assert curve.discriminant() == -16 * (4 * (-4) ** 3 + 27 * 53361**2)

    a, b, s = params.canonical_points()
    assert a == (0, 231) and b == (2, 231)
    assert curve.add(a, b) == s
    assert curve.double(a) == params.closed_form_double(a)
    assert curve.double(a)[0] == Fraction(4, 53361)
    assert curve.add(a, curve.negate(a)) is None
    assert curve.scalar_mul(3, b) == curve.add(b, curve.double(b))
    assert curve.scalar_mul(-1, s) == curve.negate(s)

    small = emcurve.Curve(-4, 1)
    counts = {ell: small.count_points(ell) for ell in (3, 5, 7, 11, 13)}
    for ell, n in counts.items():
        expected = 1 + sum(1 for x in range(ell) for y in range(ell) if (y * y - x**3 + 4 * x - 1) % ell == 0)
        assert n == expected, (ell, n, expected)

    try:
        curve.count_points(2)
    except ValueError:
        pass
    else:
        raise AssertionError("reduction mod 2 must be rejected")

    torsion = json.loads(params.torsion_json())
    assert torsion["torsion_order"] == 1 and torsion["bound_from_reduction"] == "1"

    cert = json.loads(params.rank_certificate_json())
    assert cert["rank_lower_bound"] == 2

    line = emcurve.verify(2, 3, 7, 11, height_bound=500)
    assert emcurve.recheck(line) == []
    record = json.loads(line)
    record["rank_lower_bound"] = 5
    assert emcurve.recheck(json.dumps(record)) == ["rank_lower_bound"]

    print("python smoke test ok:", params, counts)


if __name__ == "__main__":
    main()
