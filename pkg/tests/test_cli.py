import json
import os

import pytest

from voacert.cli import (EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, main,
                         resolve_state, run_suite)
from voacert.config import parse_config
from voacert.errors import ConfigError
from voacert.scalars import Q

SUITE = """
model.h.kind = heisenberg
model.h.N = 6

check.ax.type = axioms
check.ax.model = h
check.ax.samples = 30

check.un.type = unitarity
check.un.model = h

check.nm.type = norms
check.nm.model = h
check.nm.state = basis:1:0
check.nm.m_max = 2
check.nm.n_max = 4
"""


def test_resolve_state_grammar(heis8):
    assert resolve_state(heis8, "nu") == heis8.nu
    assert resolve_state(heis8, "vac").terms
    one = resolve_state(heis8, "basis:1:0")
    combo = resolve_state(heis8, "2*basis:1:0+1/2*nu")
    assert combo == one.scale(Q(2)) + heis8.nu.copy().scale(Q(1, 2))
    with pytest.raises(ConfigError):
        resolve_state(heis8, "mystery")


def test_axioms_verb(capsys):
    code = main(["axioms", "--kind", "heisenberg", "--N", "6",
                 "--samples", "20"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["pass"] is True


def test_build_and_norms_verbs(tmp_path, capsys):
    out = tmp_path / "model.json"
    assert main(["build", "--kind", "heisenberg", "--N", "5",
                 "--out", str(out)]) == EXIT_OK
    assert out.exists()
    capsys.readouterr()
    csv = tmp_path / "norms.csv"
    assert main(["norms", "--kind", "heisenberg", "--N", "6",
                 "--state", "basis:1:0", "--m-max", "2", "--n-max", "4",
                 "--csv", str(csv)]) == EXIT_OK
    assert csv.read_text().startswith("m,n,norm")


def test_certify_verb(capsys):
    code = main(["certify", "--kind", "virasoro", "--c", "1/2", "--N", "8",
                 "--check", "virasoro_bound", "--m-max", "2",
                 "--n-max", "4"])
    assert code == EXIT_OK


def test_bad_usage_exits_with_config_code(capsys):
    assert main(["certify", "--kind", "virasoro", "--N", "8",
                 "--check", "virasoro_bound"]) == EXIT_CONFIG
    assert main(["axioms", "--kind", "lattice", "--N", "6"]) == EXIT_CONFIG


def test_suite_runs_and_is_deterministic(tmp_path):
    config = parse_config(SUITE)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    bundle = run_suite(config, str(out_a), jobs=1)
    assert bundle["pass"] is True
    run_suite(config, str(out_b), jobs=1)
    blob_a = (out_a / "suite.json").read_bytes()
    blob_b = (out_b / "suite.json").read_bytes()
    assert blob_a == blob_b


def test_suite_parallel_matches_sequential(tmp_path):
    config = parse_config(SUITE)
    out_a = tmp_path / "seq"
    out_b = tmp_path / "par"
    run_suite(config, str(out_a), jobs=1)
    run_suite(config, str(out_b), jobs=3)
    assert (out_a / "suite.json").read_bytes() == \
        (out_b / "suite.json").read_bytes()


def test_corrupted_model_fails_suite(tmp_path, capsys):
    text = SUITE + "model.h.corrupt = 0,-1,2,0,0,1\n"
    path = tmp_path / "suite.cfg"
    path.write_text(text)
    code = main(["suite", "--config", str(path),
                 "--out", str(tmp_path / "rep")])
    assert code == EXIT_VIOLATION


def test_export_verb(tmp_path, capsys):
    config = parse_config(SUITE)
    out = tmp_path / "rep"
    run_suite(config, str(out), jobs=1)
    dest = tmp_path / "export"
    os.makedirs(dest)
    code = main(["export", "--bundle", str(out / "suite.json"),
                 "--format", "csv", "--out", str(dest)])
    assert code == EXIT_OK
    written = list(dest.iterdir())
    assert written
    for p in written:
        assert p.read_text().startswith("m,n,lhs,rhs,margin")
