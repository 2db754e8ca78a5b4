"""Validate every line of a puzzle JSONL file against the puzzle schema."""

import json
import sys

import jsonschema


def main(schema_path, *jsonl_paths):
    with open(schema_path) as f:
        validator = jsonschema.Draft202012Validator(json.load(f))
    n = 0
    for path in jsonl_paths:
        with open(path) as f:
            for line in f:
                if line.strip():
                    validator.validate(json.loads(line))
                    n += 1
    if n == 0:
        raise SystemExit("no puzzles found")
    print(f"{n} puzzles valid")


if __name__ == "__main__":
    main(*sys.argv[1:])
