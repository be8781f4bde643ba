"""Integration tests that exercise the popre CLI end to end."""

import json
import os
import subprocess
import sys
import tempfile

CLI = sys.argv[1] if len(sys.argv) > 1 else "popre"


def run(*args, expect=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert proc.returncode == expect, (
        f"{args}: exit {proc.returncode} (wanted {expect})\nstderr: {proc.stderr}")
    return proc


def test_channel_csv():
    out = run("channel", "--model", "erasure", "--nu", "0.5", "--n", "1").stdout
    lines = out.strip().splitlines()
    assert lines[0] == "n,model,nu"
    assert lines[1] == "1,erasure,0.5"
    assert lines[2] == "1,0"
    assert lines[3] == "0.5,0.5"


def test_eta_json():
    out = run("eta", "--model", "bitflip", "--nu", "1.0", "--n", "4", "--eps", "0.1").stdout
    report = json.loads(out)
    assert abs(report["eta"] - 0.4) < 1e-9
    assert abs(report["certificate"][0] - 0.2) < 1e-9


def test_usage_errors():
    run("estimate", expect=1)
    run("nonsense", expect=1)
    proc = subprocess.run([CLI, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ["channel", "sample", "estimate", "recover", "eta", "verify", "sweep"]:
        proc = subprocess.run([CLI, sub, "--help"], capture_output=True, text=True)
        assert proc.returncode == 0, f"{sub} --help exited {proc.returncode}"
        assert "--" in proc.stdout


def test_sample_estimate_roundtrip():
    with tempfile.TemporaryDirectory() as tmp:
        dist = os.path.join(tmp, "dist.json")
        with open(dist, "w") as f:
            json.dump({"n": 4, "entries": [{"x": "0000", "p": 1.0}]}, f)
        samples = os.path.join(tmp, "samples.txt")
        run("sample", "--model", "bitflip", "--nu", "0.8", "--dist", dist,
            "--count", "60000", "--seed", "5", "--out", samples)
        with open(samples) as f:
            header = f.readline()
        assert header == "# model=bitflip nu=0.8 n=4\n"
        out = run("estimate", "--samples", samples, "--u", "0000", "--eps", "0.1").stdout
        report = json.loads(out)
        assert abs(report["estimate"] - 1.0) <= 0.2
        assert report["samples_used"] <= 60000


def test_estimate_insufficient_samples_is_exit_2():
    with tempfile.TemporaryDirectory() as tmp:
        samples = os.path.join(tmp, "samples.txt")
        with open(samples, "w") as f:
            f.write("# model=bitflip nu=0.6 n=4\n0000\n1111\n")
        run("estimate", "--samples", samples, "--eps", "0.05", expect=2)


def test_malformed_sample_file_is_exit_1():
    with tempfile.TemporaryDirectory() as tmp:
        samples = os.path.join(tmp, "samples.txt")
        with open(samples, "w") as f:
            f.write("# model=bitflip nu=0.6 n=4\n0000\n00\n")
        proc = run("estimate", "--samples", samples, "--eps", "0.3", expect=1)
        assert "line 3" in proc.stderr


def test_recover_roundtrip():
    with tempfile.TemporaryDirectory() as tmp:
        dist = os.path.join(tmp, "dist.json")
        with open(dist, "w") as f:
            json.dump({"n": 3, "entries": [{"x": "000", "p": 0.5}, {"x": "111", "p": 0.5}]}, f)
        out = run("recover", "--model", "bitflip", "--nu", "1.0", "--n", "3",
                  "--eps", "0.1", "--dist", dist, "--seed", "3").stdout
        result = json.loads(out)
        assert result["eps"] == 0.1
        got = {e["x"]: e["p"] for e in result["entries"]}
        assert set(got) == {"000", "111"}
        # Round trip: the recovery output is a valid sampling spec.
        rec = os.path.join(tmp, "recovered.json")
        with open(rec, "w") as f:
            json.dump(result, f)
        run("sample", "--model", "bitflip", "--nu", "0.9", "--dist", rec,
            "--count", "10", "--seed", "1", "--normalize")


def test_verify_passes():
    with tempfile.TemporaryDirectory() as tmp:
        poly_csv = os.path.join(tmp, "poly.csv")
        out = run("verify", "--model", "erasure", "--nu", "0.4", "--n", "8",
                  "--eps", "0.1", "--seed", "9", "--trials", "5",
                  "--poly-out", poly_csv).stdout
        doc = json.loads(out)
        assert doc["all_pass"] is True
        checks = {r["check"] for r in doc["records"]}
        assert {"eta", "three-lines", "repeated-root", "root-bounds",
                "three-circle", "random-delta"} <= checks
        with open(poly_csv) as f:
            coeffs = [float(v) for v in f.read().strip().split(",")]
        assert sum(abs(v) for v in coeffs) <= 2.0 + 1e-6


def test_max_n_env_override():
    env = dict(os.environ, POPRE_MAX_N="4")
    proc = subprocess.run([CLI, "eta", "--model", "bitflip", "--nu", "0.9",
                           "--n", "8", "--eps", "0.1"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 1, proc.returncode
    proc = subprocess.run([CLI, "eta", "--model", "bitflip", "--nu", "0.9",
                           "--n", "8", "--eps", "0.1"],
                          capture_output=True, text=True,
                          env=dict(os.environ, POPRE_MAX_N="16"))
    assert proc.returncode == 0, proc.stderr


def test_sweep_deterministic_and_fit():
    with tempfile.TemporaryDirectory() as tmp:
        args = ["sweep", "--model", "erasure", "--nu", "0.4", "--eps", "0.1", "0.05",
                "--n", "4", "8", "--seed", "11", "--jobs", "2"]
        a = run(*args).stdout
        b = run(*args).stdout
        assert a == b
        assert a.startswith("model,nu,eps,n,eta,circle_sup,")
        fit_path = os.path.join(tmp, "fit.json")
        csv_path = os.path.join(tmp, "sweep.csv")
        run(*args, "--out", csv_path, "--fit", "eps", "--fit-out", fit_path)
        with open(fit_path) as f:
            fit = json.load(f)
        assert fit["predictor"] == "eps"
        assert fit["slope"] > 0


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
