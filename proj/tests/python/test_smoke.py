"""Smoke tests for the python bindings and the CLI binary."""

import json
import math
import os
import subprocess
import tempfile

import pytest

import discsim


def test_tree_basics():
    tree = discsim.BalancedTree(3, 2, 0.5)
    assert tree.node_count() == 13
    assert tree.potential().value == pytest.approx(13.0)
    path = tree.root_leaf_path(0)
    assert len(path) == 3
    assert tree.choose_sign(path) == 1
    tree.apply_arrival(0, 1)
    assert tree.tree_discrepancy() == 1
    assert tree.imbalance(0) == 1
    with pytest.raises(ValueError):
        discsim.BalancedTree(1, 2, 0.5)


def test_interval_run_against_oracle():
    params = discsim.derive_params(256)
    assert params.height >= 1 and params.arity >= 2
    rng_positions = [((i * 2654435761) % 997) / 997.0 for i in range(200)]
    result = discsim.run_online_interval(rng_positions, params, 1.0 / math.log(256))
    assert result.running_interval_disc == discsim.interval_discrepancy_bruteforce(
        result.transcript
    )
    alternating = discsim.offline_alternating_coloring(rng_positions)
    t = discsim.Transcript(rng_positions, alternating)
    assert discsim.final_interval_discrepancy(t) <= 1


def test_envy_definitions_agree():
    values = [0.91, 0.13, 0.55, 0.37, 0.78]
    allocated = [0, 1, 1, 0, 0]
    prefix = discsim.ordinal_envy_prefix(values, allocated)
    assert prefix == discsim.ordinal_envy_cancellation(values, allocated)
    assert discsim.ordinal_discrepancy(values, allocated) >= prefix
    assert prefix >= discsim.cardinal_envy(values, allocated) - 1e-12


def test_online_envy_chain():
    v1 = [((i * 48271) % 1009) / 1009.0 for i in range(500)]
    v2 = [((i * 69621) % 1013) / 1013.0 for i in range(500)]
    params = discsim.derive_params(500)
    r = discsim.run_online_envy(v1, v2, params, 1.0 / math.log(500))
    assert r.chain_ok
    assert r.final_cardinal_envy_p1 <= r.running_stripe_disc
    assert len(r.allocation) == 500


def test_stripe_projections():
    pts = [(((i * 131) % 613) / 613.0, ((i * 137) % 617) / 617.0) for i in range(300)]
    params = discsim.derive_params(300)
    r = discsim.run_online_stripe(pts, params, 1.0 / math.log(300))
    px = discsim.project_transcript(r.transcript, "x")
    assert r.running_disc_x == discsim.interval_discrepancy_bruteforce(px)
    assert r.running_stripe_disc == max(r.running_disc_x, r.running_disc_y)


def test_adversary_bound():
    disc, positions, signs = discsim.run_adaptive_game("potential", 100)
    assert disc >= 50
    assert len(positions) == len(signs) == 100
    cheat = discsim.run_oblivious_trials("cheat", 50, 10)
    assert all(d >= 25 for d in cheat)


def test_tightness_and_facts():
    tree, report = discsim.separation_tightness_fixture(8, 2, 4096, samples=20000, seed=1)
    assert report.mean_abs_l <= 10 * 2**-2 * report.cosh_root
    assert tree.imbalance(0) == round(report.root_imbalance)
    check = discsim.dangerous_set_facts_check(200.0, -200.0, 0.1, 2**20)
    assert check.hypothesis_ok and check.passed


def test_experiment_rows():
    rows = discsim.run_rows("interval", 1024, [1, 2], algorithm="potential")
    assert len(rows) == 2
    assert rows[0]["seed"] == 1
    assert rows[0]["running_interval_disc"] >= 1
    assert rows[0]["stripe_disc"] is None


CLI = os.environ.get("DISCSIM_CLI")


@pytest.mark.skipif(not CLI, reason="DISCSIM_CLI not set")
def test_cli_run_and_verify():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "rows.csv")
        r = subprocess.run(
            [CLI, "run", "--kind", "interval", "--n", "512", "--seeds", "3",
             "--algo", "potential", "--out", out],
            capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        with open(out) as fh:
            lines = fh.read().strip().splitlines()
        assert lines[0].startswith("schema_version,kind,n,seed")
        assert len(lines) == 4

        again = os.path.join(tmp, "rows2.csv")
        subprocess.run(
            [CLI, "run", "--kind", "interval", "--n", "512", "--seeds", "3",
             "--algo", "potential", "--out", again],
            capture_output=True, text=True, check=True)
        strip = lambda path: [l.rsplit(",", 1)[0] for l in open(path).read().splitlines()]
        assert strip(out) == strip(again)  # bit-identical minus wall_time_ms

        js = os.path.join(tmp, "rows.json")
        subprocess.run(
            [CLI, "run", "--kind", "envy", "--n", "128", "--seeds", "2", "--out", js,
             "--format", "json"],
            capture_output=True, text=True, check=True)
        rows = json.load(open(js))
        assert len(rows) == 2 and rows[0]["kind"] == "envy"

    r = subprocess.run([CLI, "verify", "--suite", "facts"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "[PASS]" in r.stdout

    r = subprocess.run([CLI, "run", "--kind", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2

    r = subprocess.run([CLI, "verify", "--suite", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2

    r = subprocess.run(
        [CLI, "run", "--kind", "interval", "--n", "128", "--seeds", "1",
         "--out", "/nonexistent-dir/x.csv"],
        capture_output=True, text=True)
    assert r.returncode == 3
