#!/usr/bin/env python3
"""
Local smoke run: drives every bundled config through the cli, once with
one sweep thread and once with eight, and checks the CSV bytes match.
Outputs land in out/local_test/ and are left in place for inspection.
"""

import os
import sys

# Ensure we're in the project root
os.chdir(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from dotenv import load_dotenv
load_dotenv()

from main import main as run_cli

OUT_DIR = os.path.join("out", "local_test")

RUNS = [
    ("spectrum", "fig2a"),
    ("spectrum", "fig2b"),
    ("spectrum", "fig2c"),
    ("map", "fig3"),
    ("map", "fig4"),
    ("map", "fig5"),
    ("map", "fig6"),
]


def run(command, name, threads):
    out = os.path.join(OUT_DIR, f"{name}_t{threads}.csv")
    code = run_cli([command, "--config", f"configs/{name}.cfg", "--threads", str(threads),
                    "--out", out, "--quiet"])
    if code != 0:
        return code, None
    with open(out, "rb") as f:
        return code, f.read()


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    failures = []

    for command, name in RUNS:
        print(f"🔄 {command} {name} ...")
        serial_code, serial = run(command, name, 1)
        parallel_code, parallel = run(command, name, 8)
        if serial_code or parallel_code:
            failures.append(f"{name}: exit codes {serial_code}/{parallel_code}")
        elif serial != parallel:
            failures.append(f"{name}: thread count changed the output bytes")
        else:
            print(f"   ✅ {len(serial):,} bytes, identical for 1 and 8 threads")

    for name in ("fig2a", "fig2b", "fig2c"):
        print(f"🔄 analyze {name} ...")
        report = os.path.join(OUT_DIR, f"{name}_analysis.json")
        code = run_cli(["analyze", "--config", f"configs/{name}.cfg", "--quiet",
                        "--input", os.path.join(OUT_DIR, f"{name}_t1.csv"), "--out", report])
        if code:
            failures.append(f"analyze {name}: exit code {code}")
        else:
            print(f"   ✅ {report}")

    print("🔄 verify ...")
    code = run_cli(["verify", "--config", "configs/verify.cfg", "--quiet",
                    "--out", os.path.join(OUT_DIR, "verify.json")])
    if code:
        failures.append(f"verify: exit code {code}")
    else:
        print("   ✅ closed forms agree with the oracle")

    if failures:
        print("\n❌ Local test failed:")
        for failure in failures:
            print(f"   - {failure}")
        sys.exit(1)
    print("\n🎉 All bundled configs ran cleanly")


if __name__ == "__main__":
    main()
