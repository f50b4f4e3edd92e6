"""Acceptance suite: one test per release criterion, each printing a
[PASS]/[FAIL] line at its stated tolerance.  Run with `pytest -s` to see
the per-criterion lines.
"""

import json
import shutil
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from lodegen import chain as chain_mod
from lodegen import lstm as lstm_mod
from lodegen.agent import astar_to_goal, bfs_search
from lodegen.chain import chain_lookup, train_chain
from lodegen.cli import main
from lodegen.generator import GenConfig, generate_level, min_bounding_grid
from lodegen.lstm import init_model, lstm_backward, lstm_forward
from lodegen.metrics import compare_sets, mann_whitney_u
from lodegen.paths import AnnotatedLevel, PathSequence
from lodegen.tiles import NO_ACTION, TileGrid, parse_level
from lodegen.training import (
    AdamState,
    TrainConfig,
    adam_step,
    make_training_pairs,
    train,
)

DATA = Path(__file__).resolve().parent.parent / "data" / "levels"


def report(name: str, ok: bool) -> bool:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}")
    return ok


# --- shared pipeline artifacts ----------------------------------------------

@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Full CLI pipeline on the bundled corpus at 2x64 scale, timed."""
    ws = tmp_path_factory.mktemp("pipeline")
    runner = CliRunner()
    t0 = time.time()

    def step(args):
        r = runner.invoke(main, args)
        assert r.exit_code == 0, r.output
        return r

    step(["solve", "--levels", str(DATA / "train"), "-o", str(ws / "paths.txt")])
    step(["ingest", "--levels", str(DATA / "train"),
          "--paths", str(ws / "paths.txt"), "-o", str(ws / "corpus.json")])
    step(["train-paths", "--corpus", str(ws / "corpus.json"),
          "-o", str(ws / "model.ckpt"),
          "--epochs", "3", "--hidden-size", "64", "--seed", "0"])
    step(["train-chain", "--corpus", str(ws / "corpus.json"),
          "-o", str(ws / "chain.json")])
    step(["gen", "--lstm", str(ws / "model.ckpt"),
          "--chain", str(ws / "chain.json"),
          "--count", "34", "--seed", "100", "-o", str(ws / "generated")])
    compare = step(["compare", str(ws / "generated"), str(DATA / "heldout"),
                    "-o", str(ws / "report.json")])
    elapsed = time.time() - t0
    return {"ws": ws, "elapsed": elapsed, "compare_output": compare.output,
            "runner": runner}


# --- criteria ----------------------------------------------------------------

def test_gradient_correctness():
    """100 random trials on a 2-layer 4-cell model, h=1e-5, rel err < 1e-4."""
    t0 = time.time()
    rng = np.random.default_rng(2024)
    h = 1e-5
    worst = 0.0
    for trial in range(100):
        model = init_model(4, 2, seed=int(rng.integers(1 << 30)))
        T = int(rng.integers(2, 5))
        x = np.zeros((1, T, 5))
        x[0, np.arange(T), rng.integers(0, 5, T)] = 1.0
        targets = np.zeros((1, T, 5))
        targets[0, np.arange(T), rng.integers(0, 5, T)] = 1.0
        _, cache = lstm_forward(model, x)
        grads, _ = lstm_backward(model, cache, targets)

        def loss_now():
            _, c = lstm_forward(model, x)
            return lstm_backward(model, c, targets)[1]

        # spot-check a random sample of coordinates in every parameter
        for name, p in model.params.items():
            flat = p.ravel()
            gflat = grads[name].ravel()
            for j in rng.choice(flat.size, size=min(3, flat.size), replace=False):
                orig = flat[j]
                flat[j] = orig + h
                up = loss_now()
                flat[j] = orig - h
                down = loss_now()
                flat[j] = orig
                fd = (up - down) / (2 * h)
                err = abs(gflat[j] - fd) / max(abs(gflat[j]), abs(fd), 1e-3)
                worst = max(worst, err)
    elapsed = time.time() - t0
    ok = worst < 1e-4 and elapsed < 10.0
    assert report(f"gradient correctness (worst rel err {worst:.2e}, "
                  f"{elapsed:.1f}s)", ok)


def test_optimizer_exactness():
    params = {"w": np.array([0.0])}
    state = AdamState.for_params(params)
    adam_step(params, {"w": np.array([1.0])}, state, lr=0.001)
    delta_ok = abs(params["w"][0] - (-0.001 / (1.0 + 1e-8))) < 1e-6

    params2 = {"w": np.array([2.5])}
    state2 = AdamState.for_params(params2)
    adam_step(params2, {"w": np.array([0.0])}, state2, lr=0.001)
    noop_ok = params2["w"][0] == 2.5
    assert report("optimizer exactness", delta_ok and noop_ok)


def periodic_path(rng, pattern="rrrrluuuu"):
    rot = int(rng.integers(len(pattern)))
    p = pattern[rot:] + pattern[:rot]
    length = int(rng.integers(150, 250))
    return PathSequence((0, 0), (p * (length // len(p) + 2))[:length])


def test_learnability():
    """2x64 model, 60 epochs on 200 periodic paths; loss and accuracy."""
    t0 = time.time()
    rng = np.random.default_rng(11)
    train_paths = [periodic_path(rng) for _ in range(200)]
    held_out = [periodic_path(rng) for _ in range(20)]

    config = TrainConfig(epochs=60, learning_rate=0.001, hidden_size=64,
                         num_layers=2, seed=0)
    model, history = train(train_paths, config)
    loss_ok = history[-1] < 0.25 * history[0]

    pairs = make_training_pairs(held_out, config.chunk_len)
    inputs = np.stack([p[0] for p in pairs])
    targets = np.stack([p[1] for p in pairs])
    probs, _ = lstm_forward(model, inputs)
    mask = targets.sum(axis=2) > 0
    correct = (probs.argmax(axis=2) == targets.argmax(axis=2)) & mask
    accuracy = correct.sum() / mask.sum()
    elapsed = time.time() - t0
    ok = loss_ok and accuracy > 0.90 and elapsed < 300
    assert report(
        f"learnability (loss {history[0]:.3f}->{history[-1]:.3f}, "
        f"accuracy {accuracy:.3f}, {elapsed:.0f}s)", ok)


def random_annotated(rng):
    w = int(rng.integers(1, 5))
    h = int(rng.integers(1, 5))
    cells = tuple(rng.choice(list(".bB#-GEM"), size=w * h))
    grid = TileGrid(w, h, cells)
    amap = tuple(
        "".join(rng.choice(list("lrucf" + NO_ACTION), size=w)) for _ in range(h)
    )
    return AnnotatedLevel(grid, amap)


def test_chain_soundness():
    rng = np.random.default_rng(3)
    sums_ok = True
    additivity_ok = True
    for _ in range(50):
        corpus = [random_annotated(rng) for _ in range(int(rng.integers(2, 6)))]
        whole = train_chain(corpus)
        for key in whole.full:
            total = sum(chain_lookup(whole, key).values())
            sums_ok &= abs(total - 1.0) <= 1e-9
        cut = int(rng.integers(1, len(corpus)))
        merged = train_chain(corpus[:cut])
        merged.merge(train_chain(corpus[cut:]))
        additivity_ok &= (merged.full == whole.full
                          and merged.backoff == whole.backoff
                          and merged.marginal == whole.marginal)
    assert report("chain soundness", sums_ok and additivity_ok)


def test_oracle_equivalence():
    rng = np.random.default_rng(17)
    discrepancies = 0
    checked = 0
    while checked < 200:
        w = int(rng.integers(2, 9))
        h = int(rng.integers(2, 9))
        cells = rng.choice(list(".bB#-"), size=w * h,
                           p=[0.45, 0.15, 0.15, 0.15, 0.1])
        grid = TileGrid(w, h, tuple(cells))
        start = (int(rng.integers(w)), int(rng.integers(h)))
        goal = (int(rng.integers(w)), int(rng.integers(h)))
        if grid.get(*start) in "bB" or grid.get(*goal) in "bB":
            continue
        checked += 1
        a = astar_to_goal(grid, start, goal)
        b = bfs_search(grid, start, goal)
        if a.reached != b.reached:
            discrepancies += 1
        elif a.reached and len(a.path) != len(b.path):
            discrepancies += 1
    assert report(f"oracle equivalence ({discrepancies} discrepancies)",
                  discrepancies == 0)


def test_constraint_satisfaction(pipeline):
    """100 generated levels: compat respected, one spawn, exact bounding box."""
    ws = pipeline["ws"]
    model = lstm_mod.load_model(str(ws / "model.ckpt"))
    table, compat, stats = chain_mod.load_models(str(ws / "chain.json"))
    violations = 0
    for seed in range(100):
        config = GenConfig(path_length=103, seed=seed)
        level, meta = generate_level(config, model, table, compat, stats)
        grid = level.grid
        w, h, start = min_bounding_grid(meta["path_actions"])
        if (grid.width, grid.height) != (w, h):
            violations += 1
        if grid.count("M") != 1:
            violations += 1
        for y in range(grid.height):
            for x in range(grid.width):
                action = level.action_at(x, y)
                if action == NO_ACTION:
                    continue
                allowed = compat.get(action)
                if not allowed:
                    continue
                tile = grid.get(x, y)
                if tile in allowed:
                    continue
                # entities only ever replace an allowed empty tile, and the
                # spawn marker sits on the path start by construction
                if tile in "GE" and "." in allowed:
                    continue
                if tile == "M" and (x, y) == tuple(meta["path_start"]):
                    continue
                violations += 1
    assert report(f"constraint satisfaction ({violations} violations)",
                  violations == 0)


def test_statistics():
    u, p = mann_whitney_u([1, 2, 3], [4, 5, 6])
    sep_ok = u == 0 and abs(p - 0.1) < 1e-12

    grids = [parse_level("M.G\nBBB"), parse_level("M..G\nBBBB"),
             parse_level("MG\nBB")]
    self_report = compare_sets(grids, grids)
    self_ok = self_report.p_value >= 0.9
    assert report(f"statistics (U={u}, p={p}, self p={self_report.p_value:.3f})",
                  sep_ok and self_ok)


def test_pipeline_reproduction_shape(pipeline):
    doc = json.loads((pipeline["ws"] / "report.json").read_text())
    columns = {"gold_total", "percent_collected", "total_nodes_explored",
               "nodes_per_gold", "width", "height", "empty_prop",
               "interesting_prop"}
    summaries = doc["summary"]
    shape_ok = all(columns <= set(s) for s in summaries.values())
    n_ok = all(v["n"] == 34 for v in doc["sets"].values())
    p_ok = 0.0 <= doc["percent_collected_test"]["p"] <= 1.0
    time_ok = pipeline["elapsed"] < 600

    # reported, not asserted: how many levels match the 32x22 original size
    gen_levels = doc["sets"]["generated"]["levels"]
    at_size = sum(1 for r in gen_levels
                  if r["width"] <= 32 and r["height"] <= 22)
    print(f"\n  generated levels within 32x22: {at_size}/34")
    assert report(
        f"pipeline reproduction shape ({pipeline['elapsed']:.0f}s end-to-end)",
        shape_ok and n_ok and p_ok and time_ok)


def test_determinism(pipeline):
    ws = pipeline["ws"]
    runner = pipeline["runner"]
    rerun = ws / "generated_rerun"
    r = runner.invoke(main, ["gen", "--lstm", str(ws / "model.ckpt"),
                             "--chain", str(ws / "chain.json"),
                             "--count", "34", "--seed", "100",
                             "-o", str(rerun)])
    assert r.exit_code == 0, r.output
    identical = all(
        (rerun / f.name).read_bytes() == f.read_bytes()
        for f in sorted((ws / "generated").iterdir())
    )
    shutil.rmtree(rerun)
    assert report("determinism (seeded gen byte-identical)", identical)
