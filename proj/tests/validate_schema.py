#!/usr/bin/env python3
"""Validate `ddw analyze --emit json` output for every model against the output schema."""
import json
import pathlib
import subprocess
import sys
import tempfile

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(0)


def main() -> int:
    ddw, schema_path, models = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    validator = jsonschema.Draft202012Validator(json.loads(schema_path.read_text()))
    runs = [[str(m)] for m in sorted(models.glob("*.lag"))]
    runs.append([str(models / "maxwell_palatini.lag"), "--stage", "hamilton-jacobi"])
    empty = tempfile.NamedTemporaryFile("w", suffix=".lag", delete=False)
    empty.write("dim 4;\nlagrangian 0;\n")
    empty.close()
    runs.append([empty.name])
    failures = 0
    for args in runs:
        out = subprocess.run([ddw, "analyze", *args, "--emit", "json"], capture_output=True, text=True)
        if out.returncode != 0:
            print(f"FAIL {' '.join(args)}: exit {out.returncode}\n{out.stderr}")
            failures += 1
            continue
        errors = list(validator.iter_errors(json.loads(out.stdout)))
        for e in errors[:5]:
            print(f"FAIL {' '.join(args)}: {'/'.join(map(str, e.absolute_path))}: {e.message[:200]}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {' '.join(args)}")
    pathlib.Path(empty.name).unlink()
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
