#!/usr/bin/env python3
"""Runs every lab command once and validates its report against the shipped schema.

usage: validate_schemas.py LAB_BINARY SCHEMA_DIR
"""

import copy
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

RUNS = {
    "build": ["--lattice", "box:3,2"],
    "sample": ["--lattice", "strip:6,3", "--seed", "3"],
    "solve": ["--lattice", "box:5,5", "--region", "3,3@1,1", "--bc", "random", "--seed", "4"],
    "enumerate": ["--lattice", "box:4,4", "--outer", "2,2@1,1", "--track", "9,10", "--outer-ladder", "2,2@1,1;4,4@0,0",
                  "--seed", "2"],
    "critical": ["--lattice", "box:3,3", "--all", "--seed", "2"],
    "interface": ["--lattice", "strip:8,6", "--seed", "3"],
    "rungs": ["--lattice", "strip:10,6", "--maxlen", "4", "--edge", "5", "--seed", "3"],
    "walls": ["--lattice", "strip:10,5", "--n", "1..3", "--k", "0..1", "--trials", "40", "--seed", "1"],
    "estimate": ["--event", "sigma_e_plus", "--outer", "2,2@1,1", "--trials", "200", "--seed", "1"],
    "verify": ["--suite", "parity", "--trials", "20", "--seed", "1"],
}
PRESETS = ["empty", "tethered", "rung"]


def run(lab, args):
    proc = subprocess.run([lab, *args], capture_output=True, text=True, check=False)
    if proc.returncode != 0:
        raise SystemExit(f"lab {' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return json.loads(proc.stdout)


def validator(schema_dir, command):
    schema = json.loads((schema_dir / f"lab.{command}.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def main():
    lab, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    failures = 0
    documents = [(cmd, [cmd, *args]) for cmd, args in RUNS.items()]
    documents += [("render-data", ["render-data", "--preset", p, "--seed", "1"]) for p in PRESETS]
    shipped = {p.name for p in schema_dir.glob("lab.*.schema.json")}
    expected = {f"lab.{c}.schema.json" for c in [*RUNS, "render-data"]}
    if shipped != expected:
        print(f"FAIL schema set: {sorted(shipped ^ expected)}")
        failures += 1

    for command, args in documents:
        v = validator(schema_dir, command)
        doc = run(lab, args)
        errors = sorted(v.iter_errors(doc), key=lambda e: list(e.absolute_path))
        for e in errors:
            print(f"FAIL {' '.join(args)}: /{'/'.join(map(str, e.absolute_path))}: {e.message}")
        failures += bool(errors)

        # A report with a foreign schema tag or a dropped result field must not validate.
        bad = copy.deepcopy(doc)
        bad["schema"] = "lab.other"
        bad_result = copy.deepcopy(doc)
        bad_result["result"].pop(next(iter(bad_result["result"])))
        for broken in (bad, bad_result):
            if v.is_valid(broken):
                print(f"FAIL {' '.join(args)}: a corrupted report validated")
                failures += 1
        if not errors:
            print(f"ok   {' '.join(args)}")

    # Reports written with --out match stdout byte for byte.
    with tempfile.TemporaryDirectory() as tmp:
        path = pathlib.Path(tmp) / "r.json"
        subprocess.run([lab, "sample", "--lattice", "box:3,3", "--seed", "9", "--out", str(path)], check=True)
        direct = subprocess.run([lab, "sample", "--lattice", "box:3,3", "--seed", "9"], capture_output=True,
                                text=True, check=True).stdout
        if path.read_text() != direct:
            print("FAIL --out differs from stdout")
            failures += 1

    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
