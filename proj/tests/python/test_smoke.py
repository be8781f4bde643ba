"""Smoke tests for the _popre extension module."""

import math
import sys

import _popre


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def test_channel_matrix():
    rows = _popre.channel_matrix("erasure", 0.5, 1)
    approx(rows[0][0], 1.0)
    approx(rows[0][1], 0.0)
    approx(rows[1][0], 0.5)
    approx(rows[1][1], 0.5)
    rows = _popre.channel_matrix("bitflip", 0.5, 1)
    approx(rows[0][0], 0.75)
    approx(rows[1][1], 0.75)


def test_apply_noise_noiseless():
    assert _popre.apply_noise("erasure", 1.0, "0110", seed=4) == "0110"
    assert _popre.apply_noise("bitflip", 1.0, "0110", seed=4) == "0110"


def test_push_forward():
    q = _popre.push_forward([0.0, 1.0], "erasure", 0.5)
    approx(q[0], 0.5)
    approx(q[1], 0.5)


def test_eta_noiseless():
    report = _popre.eta_exact("bitflip", 1.0, 4, 0.1)
    approx(report["eta"], 0.4)
    approx(report["certificate"][0], 0.2)
    assert report["circle_sup"] <= report["eta"] * (1 + 1e-6) + 1e-12


def test_required_samples():
    assert _popre.required_samples(15, 0.1) == 25600


def test_estimate_noiseless():
    samples = ["101"] * 4000
    rep = _popre.estimate_point_mass("bitflip", 1.0, samples, "101", 0.2,
                                     delta_mode="manual", delta=0.2)
    approx(rep["estimate"], 1.0)


def test_recover_noiseless():
    entries = _popre.recover_distribution(
        "bitflip", 1.0, 3, [("000", 0.5), ("111", 0.5)], 0.1, seed=7)
    got = dict(entries)
    assert set(got) == {"000", "111"}
    for p in got.values():
        assert abs(p - 0.5) <= 0.1


def test_sup_on_region():
    s = _popre.sup_on_region([0.0, 1.0])
    approx(s["value"], 1.0, 1e-9)
    s = _popre.sup_on_region([0.0, 1.0], region="ellipse_b", p1=0.1, p2=2.0)
    approx(s["value"], 1.2, 1e-8)


def test_repeated_root_poly():
    p = _popre.construct_repeated_root_poly(2, 2)
    approx(p["a0_level"], 0.5)
    approx(p["coeffs"][1], -1.0)
    assert p["certified"] == 2


def test_theory_bounds():
    import json
    tb = json.loads(_popre.theory_bounds("erasure", 0.5, 16, 0.1))
    approx(tb["exponent_erasure"], math.log(10.0) / 0.5, 1e-12)


def test_fit_power_law():
    xs = [1.0, 2.0, 4.0, 8.0]
    ys = [2.0 * math.log(x) for x in xs]
    fit = _popre.fit_power_law(xs, ys)
    approx(fit["slope"], 2.0)
    approx(fit["r_squared"], 1.0)


def main():
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"PASS {name}")
            except Exception as exc:  # noqa: BLE001
                print(f"FAIL {name}: {exc}")
                failures += 1
    return failures


if __name__ == "__main__":
    sys.exit(main())
