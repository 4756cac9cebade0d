#!/usr/bin/env python3
"""Validates pipeline artifacts in an output directory against schemas/."""

import argparse
import json
import pathlib
import sys

import jsonschema

ARTIFACTS = {
    "commits": ("commits.jsonl", True),
    "modifications": ("modifications.jsonl", True),
    "impacts": ("impacts.jsonl", True),
    "summaries": ("summaries.jsonl", True),
    "clusters": ("clusters.json", False),
    "report": ("report.json", False),
}


def documents(path, lines):
    if not lines:
        yield 1, json.loads(path.read_text(encoding="utf-8"))
        return
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if line.strip():
            yield n, json.loads(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--schemas", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent / "schemas")
    args = parser.parse_args()

    failures = 0
    for name, (filename, lines) in ARTIFACTS.items():
        schema = json.loads((args.schemas / f"{name}.schema.json").read_text(encoding="utf-8"))
        validator = jsonschema.Draft202012Validator(schema)
        path = args.out_dir / filename
        if not path.is_file():
            print(f"{filename}: missing")
            failures += 1
            continue
        count = 0
        for n, doc in documents(path, lines):
            count += 1
            for error in validator.iter_errors(doc):
                print(f"{filename}:{n}: {error.json_path}: {error.message}")
                failures += 1
        if count == 0:
            print(f"{filename}: empty")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
