"""Validate pipeline config files against the published JSON schema."""
import json
import sys

import jsonschema


def main(argv):
    if len(argv) < 3:
        print(f"usage: {argv[0]} SCHEMA CONFIG...", file=sys.stderr)
        return 2
    with open(argv[1]) as f:
        schema = json.load(f)
    jsonschema.Draft7Validator.check_schema(schema)
    validator = jsonschema.Draft7Validator(schema)
    failed = 0
    for path in argv[2:]:
        with open(path) as f:
            doc = json.load(f)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            where = "/".join(str(p) for p in e.path) or "<root>"
            print(f"{path}: {where}: {e.message}")
        failed += bool(errors)
        if not errors:
            print(f"{path}: ok")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
