"""Shared helpers for the experiment scripts: dataclass configs overridable from the command line."""
import argparse
import dataclasses
import json


def parse_config(cls, description: str):
    """Build ``cls`` from ``--field value`` flags, one per dataclass field."""
    p = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        p.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    p.add_argument("--out", help="write the results as JSON")
    args = vars(p.parse_args())
    out = args.pop("out")
    return cls(**{k: v for k, v in args.items()}), out


def dump(path, payload) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
