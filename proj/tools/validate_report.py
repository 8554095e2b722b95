#!/usr/bin/env python3
"""Validate a decaylab report.json against schema/report.schema.json.

usage: validate_report.py REPORT [SCHEMA]
Exit status 0 when valid, 1 when invalid, 2 when the validator is unavailable.
"""
import json
import pathlib
import sys


def main(argv):
    if len(argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    report = pathlib.Path(argv[1])
    schema = pathlib.Path(argv[2]) if len(argv) > 2 else (
        pathlib.Path(__file__).resolve().parent.parent / "schema" / "report.schema.json")
    try:
        import jsonschema
    except ImportError:
        print("python package jsonschema is not installed", file=sys.stderr)
        return 2
    doc = json.loads(report.read_text())
    validator = jsonschema.Draft202012Validator(json.loads(schema.read_text()))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    for e in errors[:20]:
        where = "/".join(str(p) for p in e.path) or "<root>"
        print(f"{report}: {where}: {e.message}", file=sys.stderr)
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
