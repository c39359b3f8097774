"""End-to-end checks of the scanb command-line tool.

Usage: python3 test_cli.py /path/to/scanb
"""

import json
import math
import os
import shutil
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
failures = []


def run(*args, **kwargs):
    return subprocess.run([BIN, *args], capture_output=True, text=True, **kwargs)


def check(name, condition, detail=""):
    status = "ok" if condition else "FAIL"
    print(f"{status:4s} {name}" + (f"  ({detail})" if detail and not condition else ""))
    if not condition:
        failures.append(name)


def parse_kv(stdout):
    out = {}
    for line in stdout.splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            out[key] = value
    return out


def test_calibrate():
    res = run("calibrate", "--arl", "5000", "--b0", "20")
    check("calibrate exits 0", res.returncode == 0, res.stderr)
    kv = parse_kv(res.stdout)
    threshold = float(kv["threshold"])
    arl_check = float(kv["arl_check"])
    check("calibrate round trip", abs(arl_check - 5000) < 1, f"arl_check={arl_check}")

    res_low = run("calibrate", "--arl", "1000", "--b0", "20")
    check("threshold increases with ARL",
          float(parse_kv(res_low.stdout)["threshold"]) < threshold)

    res_bad = run("calibrate", "--arl", "0.5")
    check("calibrate rejects ARL 0.5 with exit 2", res_bad.returncode == 2, res_bad.stderr)


def test_generate(tmp):
    out = os.path.join(tmp, "case5.csv")
    res = run("generate", "--case", "case5-laplace", "--tau", "100", "--length", "200",
              "--seed", "7", "--out", out)
    check("generate exits 0", res.returncode == 0, res.stderr)
    with open(out) as f:
        rows = [line.strip().split(",") for line in f if line.strip()]
    check("generate writes 200 rows", len(rows) == 200, f"rows={len(rows)}")
    check("generate case5 is univariate", all(len(r) == 1 for r in rows))

    out2 = os.path.join(tmp, "case5_again.csv")
    run("generate", "--case", "case5-laplace", "--tau", "100", "--length", "200",
        "--seed", "7", "--out", out2)
    with open(out) as a, open(out2) as b:
        check("generate is deterministic in the seed", a.read() == b.read())

    res_bad = run("generate", "--case", "case5-laplace", "--tau", "300", "--length", "200",
                  "--seed", "7", "--out", os.path.join(tmp, "bad.csv"))
    check("generate rejects tau > length with exit 2", res_bad.returncode == 2,
          res_bad.stderr)


def test_detect(tmp):
    pool = os.path.join(tmp, "pool.csv")
    null_stream = os.path.join(tmp, "null.csv")
    shift_stream = os.path.join(tmp, "shift.csv")
    run("generate", "--case", "null-only", "--tau", "300", "--length", "300",
        "--seed", "11", "--out", pool)
    run("generate", "--case", "null-only", "--tau", "100", "--length", "100",
        "--seed", "12", "--out", null_stream)
    run("generate", "--case", "case1-mean-shift", "--tau", "0", "--length", "80",
        "--seed", "13", "--out", shift_stream)

    res = run("detect", "--stream", null_stream, "--pool", pool,
              "--threshold", "1000000", "--seed", "3")
    check("detect huge threshold exits 0 with no alarm",
          res.returncode == 0 and "no alarm" in res.stdout, res.stdout + res.stderr)
    check("detect reports a statistic", "statistic=" in res.stdout)

    alarms = 0
    for seed in range(5):
        stream = os.path.join(tmp, f"alarm{seed}.csv")
        run("generate", "--case", "case1-mean-shift", "--tau", "0", "--length", "70",
            "--seed", str(100 + seed), "--out", stream)
        res = run("detect", "--stream", stream, "--pool", pool,
                  "--arl", "500", "--seed", str(seed))
        if res.returncode == 0 and "alarm at t=" in res.stdout:
            t = int(res.stdout.split("alarm at t=")[1].splitlines()[0])
            if t <= 70:
                alarms += 1
    check("detect alarms on immediate mean shift (5/5 seeded trials)", alarms == 5,
          f"alarms={alarms}")

    narrow = os.path.join(tmp, "narrow.csv")
    with open(narrow, "w") as f:
        f.write("1.0,2.0,3.0\n4.0,5.0,6.0\n")
    res = run("detect", "--stream", narrow, "--pool", pool, "--threshold", "3")
    check("detect rejects dimension mismatch with exit 2", res.returncode == 2, res.stderr)

    malformed = os.path.join(tmp, "malformed.csv")
    with open(malformed, "w") as f:
        f.write(",".join(["1.0"] * 10) + "\n" + ",".join(["oops"] + ["1.0"] * 9) + "\n")
    res = run("detect", "--stream", malformed, "--pool", pool, "--threshold", "3")
    check("detect reports malformed rows with exit 1", res.returncode == 1, res.stderr)
    check("malformed-row error names the row", "row 2" in res.stderr, res.stderr)


def test_experiment(tmp):
    config = {
        "methods": ["scanB"],
        "cases": ["case1-mean-shift"],
        "target_arl": 100,
        "replications": 5,
        "reference_pool_size": 200,
        "tuple_budget": 300,
        "base_seed": 42,
    }
    cfg_path = os.path.join(tmp, "config.json")
    with open(cfg_path, "w") as f:
        json.dump(config, f)

    out_a = os.path.join(tmp, "out_a")
    res = run("experiment", "--config", cfg_path, "--out", out_a)
    check("experiment exits 0", res.returncode == 0, res.stdout + res.stderr)
    reps_path = os.path.join(out_a, "replications.csv")
    summary_path = os.path.join(out_a, "summary.csv")
    check("experiment writes replications.csv", os.path.exists(reps_path))
    check("experiment writes summary.csv", os.path.exists(summary_path))
    with open(reps_path) as f:
        header = f.readline().strip()
        rows = f.readlines()
    check("replications header",
          header == "method,case,B0,N,kernel,sigma_multiplier,replication,delay,censored")
    check("one replication row per rep", len(rows) == 5, f"rows={len(rows)}")

    out_b = os.path.join(tmp, "out_b")
    run("experiment", "--config", cfg_path, "--out", out_b)
    same = all(
        open(os.path.join(out_a, name)).read() == open(os.path.join(out_b, name)).read()
        for name in ("replications.csv", "summary.csv"))
    check("experiment rerun is byte-identical", same)

    config["mystery_knob"] = 3
    with open(cfg_path, "w") as f:
        json.dump(config, f)
    res = run("experiment", "--config", cfg_path, "--out", os.path.join(tmp, "out_c"))
    check("unknown config key exits 2", res.returncode == 2, res.stderr)
    check("unknown key is named", "mystery_knob" in res.stderr, res.stderr)


def main():
    tmp = tempfile.mkdtemp(prefix="scanb_cli_")
    try:
        test_calibrate()
        test_generate(tmp)
        test_detect(tmp)
        test_experiment(tmp)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    if failures:
        print(f"{len(failures)} CLI checks failed: {failures}")
        return 1
    print("all CLI checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
