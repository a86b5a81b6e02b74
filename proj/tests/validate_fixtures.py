"""Validates the shipped decision fixtures against the decision schema."""
import json
import pathlib
import sys

import jsonschema


def main(schema_path, fixture_dir):
    schema = json.loads(pathlib.Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    checked = 0
    for path in sorted(pathlib.Path(fixture_dir).glob("*.json")):
        doc = json.loads(path.read_text())
        if doc.get("schema") == "egl.decision-cases/1":
            docs = [{"schema": "egl.decision/1", "normal_crossing": c["normal_crossing"]} for c in doc["cases"]]
        else:
            docs = [doc]
        for d in docs:
            validator.validate(d)
            checked += 1
    bad = {"schema": "egl.decision/1", "smooth": {"domain": {"generators": ["a"]}}}
    if validator.is_valid(bad):
        print("schema accepts an incomplete document")
        return 1
    print(f"{checked} documents valid")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
