# Copyright 2026 The tomoplan Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Run the CLI over a spread of commands and validate every JSON artifact."""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

RUNS = {
    "plan_volume": ["plan-qubit", "--u", "0.3,0.2,0.5", "--n", "300", "--mode", "volume", "--numeric"],
    "plan_distance": ["plan-qubit", "--u", "0,0,0.6", "--n", "300", "--mode", "distance"],
    "simulate_adaptive": ["simulate", "--strategy", "adaptive", "--u", "0,0,0.6", "--n", "3000", "--batch", "300",
                          "--trials", "4", "--trajectory"],
    "simulate_xyz": ["simulate", "--strategy", "fixed-xyz", "--u", "0.1,0.2,0.3", "--n", "600", "--trials", "3"],
    "simulate_strategy1": ["simulate", "--strategy", "strategy1", "--state", "diag:0.5,0.3,0.2", "--n", "3000",
                           "--trials", "3"],
    "compare": ["compare", "--d", "4,6", "--state", "tracial", "--n", "1000", "--mode", "both"],
    "partition": ["partition", "--d", "8"],
    "escalate": ["escalate", "--dim", "20", "--state", "basis:4", "--runs", "3"],
    "escalate_tomo": ["escalate", "--dim", "20", "--state", "basis:2", "--runs", "3", "--n-tomo", "500,2000"],
}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--binary", required=True)
    parser.add_argument("--schemas", required=True)
    args = parser.parse_args()

    schema_dir = pathlib.Path(args.schemas)
    schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())

    def validator(name):
        cls = jsonschema.validators.validator_for(schemas[name])
        cls.check_schema(schemas[name])
        return cls(schemas[name], registry=registry)

    failures = 0
    checked = 0
    with tempfile.TemporaryDirectory() as tmp:
        for label, argv in RUNS.items():
            out = pathlib.Path(tmp) / label
            proc = subprocess.run([args.binary, "--quiet", "--out-dir", str(out), *argv],
                                  capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            command = argv[0]
            targets = [(out / f"{command}.json", f"{command}.schema.json"),
                       (out / f"{command}.manifest.json", "manifest.schema.json")]
            docs = [(path, json.loads(path.read_text()), schema) for path, schema in targets]
            jsonl = out / f"{command}.jsonl"
            if jsonl.exists():
                for line in jsonl.read_text().splitlines():
                    docs.append((jsonl, json.loads(line), "simulate-trial.schema.json"))
            for path, doc, schema in docs:
                errors = list(validator(schema).iter_errors(doc))
                checked += 1
                if errors:
                    failures += 1
                    print(f"FAIL {label}: {path.name}: {errors[0].message} at {list(errors[0].absolute_path)}")
    print(f"{checked} documents checked, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
