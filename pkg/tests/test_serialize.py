import json

import pytest

from voacert.errors import ConfigError, ModelBugError
from voacert.graded_fock import build_model, heisenberg_spec, lattice_spec
from voacert.mode_engine import generator_mode
from voacert.serialize import (ModelCache, load_model, save_model,
                               spec_digest, spec_from_dict, spec_to_dict)


def test_spec_dict_round_trip():
    for spec in (heisenberg_spec(1, 6), lattice_spec(2, 6)):
        assert spec_from_dict(spec_to_dict(spec)) == spec


def test_digest_is_stable_and_distinguishing():
    a = spec_digest(heisenberg_spec(1, 6))
    assert a == spec_digest(heisenberg_spec(1, 6))
    assert a != spec_digest(heisenberg_spec(1, 8))
    assert a != spec_digest(lattice_spec(2, 6))


def test_save_load_round_trip(tmp_path):
    model = build_model(heisenberg_spec(1, 6))
    generator_mode(model, 0, -1)  # materialize some blocks
    path = tmp_path / "model.json"
    save_model(model, str(path))
    again = load_model(str(path))
    assert again.spec == model.spec
    assert [again.dim(d) for d in range(7)] == \
        [model.dim(d) for d in range(7)]
    assert again.nu == model.nu


def test_load_rejects_tampered_container(tmp_path):
    model = build_model(heisenberg_spec(1, 6))
    path = tmp_path / "model.json"
    save_model(model, str(path))
    data = json.loads(path.read_text())
    data["dims"][2] += 1
    path.write_text(json.dumps(data))
    with pytest.raises(ModelBugError):
        load_model(str(path))


def test_load_rejects_unknown_schema(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"schema": "something-else"}))
    with pytest.raises(ConfigError):
        load_model(str(path))


def test_cache_hits_disk_then_memory(tmp_path):
    cache = ModelCache(str(tmp_path))
    spec = heisenberg_spec(1, 5)
    first = cache.get_or_build(spec)
    assert (tmp_path / (spec_digest(spec) + ".json")).exists()
    assert cache.get_or_build(spec) is first
    # a fresh cache object reloads from disk and verifies
    second = ModelCache(str(tmp_path)).get_or_build(spec)
    assert second.nu == first.nu


def test_cache_skips_disk_for_padded_builds(tmp_path):
    cache = ModelCache(str(tmp_path))
    spec = heisenberg_spec(1, 5)
    cache.get_or_build(spec, pad=2)
    assert not (tmp_path / (spec_digest(spec) + ".json")).exists()
