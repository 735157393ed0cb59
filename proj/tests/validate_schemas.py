"""Validates `ellreg list --json` and the shipped configs against the published schemas."""
import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

binary, root = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.json")}
registry = Registry().with_resources(
    (doc["$id"], Resource.from_contents(doc)) for doc in schemas.values()
)


def check(doc, schema_name):
    jsonschema.Draft202012Validator(schemas[schema_name], registry=registry).validate(doc)


catalog = json.loads(subprocess.run([binary, "list", "--json"], check=True, capture_output=True).stdout)
check(catalog, "catalog.schema.json")
kinds = [e["kind"] for e in catalog["experiments"]]
assert len(set(kinds)) == 9, kinds

configs = sorted((root / "configs").glob("*.json"))
assert {c.stem for c in configs} == set(kinds), [c.stem for c in configs]
for c in configs:
    check(json.loads(c.read_text()), "config.schema.json")
print(f"catalog and {len(configs)} configs validate")
