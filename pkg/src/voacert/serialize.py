"""Model persistence and the content-addressed build cache.

The on-disk container records the model specification, graded dimensions,
the conformal state, and every materialized generator block with rational
entries as "p/q" strings.  Loading rebuilds the model from its spec (the
construction is deterministic) and cross-checks the stored data, so a
cache hit can never drift from a cold build.
"""

from __future__ import annotations

import hashlib
import json
import os

from .errors import ConfigError, ModelBugError
from .graded_fock import BasisState, Model, ModelSpec, build_model
from .scalars import rat_from_str, rat_to_str

SCHEMA = "voacert-model/1"


def spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "kind": spec.kind,
        "N": spec.N,
        "rank": spec.rank,
        "metric": [[rat_to_str(x) for x in row] for row in spec.metric],
        "c": rat_to_str(spec.c) if spec.c is not None else None,
        "q": spec.q,
    }


def spec_from_dict(data: dict) -> ModelSpec:
    return ModelSpec(
        kind=data["kind"],
        N=data["N"],
        rank=data.get("rank", 1),
        metric=tuple(tuple(rat_from_str(x) for x in row)
                     for row in data.get("metric", [])),
        c=rat_from_str(data["c"]) if data.get("c") is not None else None,
        q=data.get("q", 0),
    )


def spec_digest(spec: ModelSpec) -> str:
    blob = json.dumps(spec_to_dict(spec), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _state_label(state: BasisState) -> str:
    factors = ";".join(f"{gid},{m}" for gid, m in state.factors)
    return f"{state.sector}|{factors}"


def _mat_to_lists(mat):
    return [[rat_to_str(x) for x in row] for row in mat]


def _mat_from_lists(rows):
    return [[rat_from_str(x) for x in row] for row in rows]


def model_to_dict(model: Model) -> dict:
    blocks = {}
    for (gid, m), per_src in sorted(model._gen_blocks.items()):
        for src in sorted(per_src):
            blocks[f"{gid}:{m}:{src}"] = _mat_to_lists(per_src[src])
    return {
        "schema": SCHEMA,
        "spec": spec_to_dict(model.spec),
        "digest": spec_digest(model.spec),
        "n_internal": model.n_internal,
        "dims": [model.dim(d) for d in range(model.n_internal + 1)],
        "states": [[_state_label(st) for st in model.basis.states(d)]
                   for d in range(model.n_internal + 1)],
        "nu": {_state_label(st): rat_to_str(co)
               for st, co in sorted(model.nu.terms.items(),
                                    key=lambda kv: _state_label(kv[0]))},
        "c": rat_to_str(model.c),
        "blocks": blocks,
    }


def save_model(model: Model, path: str):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)


def load_model(path: str) -> Model:
    """Rebuild the model for a stored container and verify it against it."""
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != SCHEMA:
        raise ConfigError(f"unknown container schema {data.get('schema')!r}")
    spec = spec_from_dict(data["spec"])
    model = build_model(spec)
    stored_dims = data["dims"][:model.n_internal + 1]
    built_dims = [model.dim(d) for d in range(model.n_internal + 1)]
    if stored_dims != built_dims[:len(stored_dims)]:
        raise ModelBugError("stored dimensions disagree with rebuild; "
                            "stale or corrupted container")
    for key, rows in data["blocks"].items():
        gid, m, src = (int(x) for x in key.split(":"))
        if src > model.n_internal or src - m > model.n_internal \
                or src - m < 0:
            continue
        if model.gen_block(gid, m, src) != _mat_from_lists(rows):
            raise ModelBugError(
                f"stored block {key} disagrees with rebuild")
    if {_state_label(st): rat_to_str(co)
            for st, co in model.nu.terms.items()} != data["nu"]:
        raise ModelBugError("stored conformal state disagrees with rebuild")
    return model


class ModelCache:
    """Directory of built models keyed by the spec digest."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self._live = {}

    def path_for(self, spec: ModelSpec) -> str:
        return os.path.join(self.directory, spec_digest(spec) + ".json")

    def get_or_build(self, spec: ModelSpec, pad: int = None) -> Model:
        key = (spec_digest(spec), pad)
        if key in self._live:
            return self._live[key]
        path = self.path_for(spec)
        if pad is None and os.path.exists(path):
            model = load_model(path)
        else:
            model = build_model(spec, pad=pad)
            if pad is None:
                save_model(model, path)
        self._live[key] = model
        return model
