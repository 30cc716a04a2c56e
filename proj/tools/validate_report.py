#!/usr/bin/env python3
"""Validate tracelab JSON reports against tools/report.schema.json."""
import json
import pathlib
import sys

import jsonschema

schema = json.loads((pathlib.Path(__file__).parent / "report.schema.json").read_text())
for path in sys.argv[1:]:
    report = json.loads(pathlib.Path(path).read_text())
    jsonschema.validate(report, schema)
    ids = [c["id"] for c in report["cases"]]
    assert ids == sorted(ids), f"{path}: cases not sorted by id"
    print(f"{path}: ok ({len(ids)} cases)")
