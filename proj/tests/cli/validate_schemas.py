"""Runs each JSON-producing subcommand and validates its output against the
shipped schema. Usage: validate_schemas.py <covq binary> <schema dir>"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

RATES = ["--lambda-w", "0.3", "--lambda-b", "0.2", "--mu", "1"]


def run(binary, *args):
    proc = subprocess.run([binary, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"covq {' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc.stdout


def main():
    binary, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text())
               for p in schema_dir.glob("*.schema.json")}
    for schema in schemas.values():
        jsonschema.Draft202012Validator.check_schema(schema)

    with tempfile.TemporaryDirectory() as tmp:
        seq = pathlib.Path(tmp, "seq.txt")
        cases = [
            ("simulate_summary", ["simulate", *RATES, "--n", "200", "--seed", "7", "--hyp", "h1",
                                  "--out", str(seq)]),
            ("llr_result", ["detect", *RATES, "--input", str(seq)]),
            ("error_record", ["detect", *RATES, "--n", "100"]),
            ("error_record", ["detect", *RATES, "--n", "30", "--method", "monte-carlo",
                              "--trials", "500", "--seed", "3"]),
            ("exponent_report", ["exponent", *RATES]),
            ("exponent_report", ["exponent", *RATES, "--sweep-lambda-b", "0.01,0.2"]),
            ("exponent_report", ["exponent", "--lambda-w", "0.3", "--lambda-b", "1e-9"]),
            ("bound_report", ["bound", "--lambda-w", "0.3", "--n", "1000", "--lambda-b", "0.02",
                              "--n-values", "100,1000,10000"]),
            ("bound_report", ["bound", "--lambda-w", "0.3", "--n", "1000", "--k-family", "power",
                              "--k0", "0.5", "--alpha", "0.1"]),
            ("sweep", ["sweep", *RATES, "--n", "50", "--thresholds", "-1,0,1"]),
            ("sweep", ["sweep", *RATES, "--n", "20", "--method", "monte-carlo", "--trials", "300",
                       "--seed", "2", "--thresholds", "0"]),
            ("experiment_result", ["campaign", *RATES, "--n-grid", "100:100:400", "--seed", "1"]),
            ("experiment_result", ["campaign", *RATES, "--n-grid", "5,10", "--seed", "1",
                                   "--use-exact", "false", "--trials", "300"]),
            ("experiment_result", ["campaign", "--lambda-w", "0.3", "--lambda-b", "0",
                                   "--n-grid", "5,10,20", "--seed", "1", "--trials", "100"]),
        ]
        for name, args in cases:
            jsonschema.validate(json.loads(run(binary, *args)), schemas[name],
                                cls=jsonschema.Draft202012Validator)
            print(f"ok  {name:18s} covq {' '.join(args[:1])}")

        prefix = pathlib.Path(tmp, "camp")
        run(binary, "campaign", *RATES, "--n-grid", "10,20,30", "--seed", "4", "--out", str(prefix))
        jsonschema.validate(json.loads(prefix.with_suffix(".json").read_text()),
                            schemas["experiment_result"], cls=jsonschema.Draft202012Validator)
        print("ok  experiment_result  campaign --out")


if __name__ == "__main__":
    main()
