#!/usr/bin/env python3
# Copyright 2026 The Audiodist Authors. All Rights Reserved.
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
"""Runs the CLI on toy inputs and validates every JSON output against schemas/."""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def load_schemas(schema_dir):
  schemas = {}
  for path in sorted(pathlib.Path(schema_dir).glob("*.schema.json")):
    schemas[path.name] = json.loads(path.read_text())
  registry = Registry().with_resources(
      (name, Resource.from_contents(s)) for name, s in schemas.items())
  return schemas, registry


def run(cli, *args):
  proc = subprocess.run([cli, *args], capture_output=True, text=True)
  if proc.returncode != 0:
    sys.exit(f"{' '.join(args)} exited {proc.returncode}: {proc.stderr}")
  return proc.stdout


def main():
  parser = argparse.ArgumentParser()
  parser.add_argument("--cli", required=True)
  parser.add_argument("--schemas", required=True)
  parser.add_argument("--toy", required=True)
  args = parser.parse_args()

  schemas, registry = load_schemas(args.schemas)
  failures = 0

  def check(schema_name, instance, label):
    nonlocal failures
    validator = jsonschema.Draft202012Validator(schemas[schema_name],
                                                registry=registry)
    errors = sorted(validator.iter_errors(instance), key=str)
    if errors:
      failures += 1
      print(f"FAIL {label}: {errors[0].message} at {list(errors[0].path)}")
    else:
      print(f"ok   {label}")

  toy = pathlib.Path(args.toy)
  manifest = toy / "manifest.json"
  check("eval_manifest.schema.json", json.loads(manifest.read_text()), "toy manifest")

  with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    ref = toy / "emb" / "speech1_ref.npy"
    test = toy / "emb" / "speech1_codec_16.npy"
    if not ref.exists():
      ref, test = sorted((toy / "emb").glob("*.npy"))[:2]

    for metric_args in (["--metric", "fad"],
                        ["--metric", "mmd", "--sigma-mode", "median"],
                        ["--metric", "mmd", "--sigma-sweep"],
                        ["--metric", "fad-inf", "--sizes", "10,20,30",
                         "--draws", "2"]):
      out = run(args.cli, "--seed", "3", "dist", *metric_args,
                "--ref", str(ref), "--test", str(test))
      check("distance_result.schema.json", json.loads(out),
            "dist " + " ".join(metric_args))

    synth_dir = tmp / "synth"
    run(args.cli, "--seed", "5", "synth", "--count", "3", "--duration", "1",
        "--out", str(synth_dir))
    for i, line in enumerate((synth_dir / "manifest.jsonl").read_text().splitlines()):
      check("synth_manifest.schema.json", json.loads(line), f"synth record {i}")
    check("run_config.schema.json",
          json.loads((synth_dir / "run_config.json").read_text()), "synth run config")

    batch_path = tmp / "batches.jsonl"
    run(args.cli, "--seed", "5", "batch", "--pool", str(synth_dir),
        "--batch-size", "8", "--fraction", "0.25", "--num-batches", "2",
        "--out", str(batch_path))
    for i, line in enumerate(batch_path.read_text().splitlines()):
      check("batch_manifest.schema.json", json.loads(line), f"batch record {i}")
    check("run_config.schema.json",
          json.loads(batch_path.with_suffix(".run_config.json").read_text()),
          "batch run config")

    eval_dir = tmp / "eval"
    run(args.cli, "eval", "--manifest", str(manifest), "--metrics",
        "fad,mmd_median", "--out", str(eval_dir), "--formats", "json")
    check("report.schema.json", json.loads((eval_dir / "report.json").read_text()),
          "eval report")
    check("run_config.schema.json",
          json.loads((eval_dir / "run_config.json").read_text()), "eval run config")

  return 1 if failures else 0


if __name__ == "__main__":
  sys.exit(main())
