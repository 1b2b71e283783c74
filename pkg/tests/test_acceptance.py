"""Acceptance criteria, one test per criterion.

Each test records a one-line verdict through the ``report`` fixture; the lines
are printed together at the end of the pytest run.  Criterion 7 is a soft
report and never fails the build.
"""

import math
import time

import numpy as np
import pytest

import oracles
from d2dsim import (
    Allocation,
    RicaParams,
    ScenarioConfig,
    allocate_exhaustive,
    allocate_new_auction,
    allocate_random,
    make_instance,
    marginal_gain,
    paired_differences,
    sinr_cellular,
    sinr_d2d,
    sinr_pdf,
    sum_rate,
    sweep_d2d_count,
)
from d2dsim.cli import main
from d2dsim.harness import run_grid

DEFAULT = ScenarioConfig()
AUCTIONS = ["random", "rica", "new-auction"]


@pytest.fixture(scope="module")
def paired_drops():
    """200 paired drops at D=8 for C in {3, 4}, all three allocators."""
    t0 = time.perf_counter()
    res = run_grid(DEFAULT.replace(num_d2d=8), AUCTIONS, [3, 4], [8], 200, 0, workers=1)
    return res, time.perf_counter() - t0


def _c_only(res, c):
    return [t for t in res.trials if t.num_cellular == c]


def test_c1_new_auction_not_worse_than_rica(paired_drops, report):
    res, elapsed = paired_drops
    (p,) = paired_differences(_c_only(res, 4), "new-auction", "rica")
    ok = p.mean_diff >= -p.std_err
    report(
        "C1 new-auction >= R-ICA (C=4, D=8, 200 drops)",
        ok,
        f"mean diff {p.mean_diff:+.4f} +- {p.std_err:.4f} (slack -1 SE); grid time {elapsed:.1f}s",
    )
    assert elapsed < 120.0
    assert ok, f"new-auction - rica = {p.mean_diff:+.4f} with SE {p.std_err:.4f}"


@pytest.mark.parametrize("c", [3, 4])
def test_c2_auctions_beat_random(paired_drops, report, c):
    res, _ = paired_drops
    rows = _c_only(res, c)
    lines, ok = [], True
    for name in ("new-auction", "rica"):
        (p,) = paired_differences(rows, name, "random")
        z = p.mean_diff / p.std_err if p.std_err > 0 else math.inf
        ok &= p.mean_diff > 2 * p.std_err
        lines.append(f"{name}-random {p.mean_diff:+.3f} ({z:.1f} SE)")
    report(f"C2 auctions beat random (C={c}, D=8, 200 drops)", ok, "; ".join(lines))
    assert ok


def test_c3_sum_rate_saturates(report):
    # D=0 is the empty-allocation baseline needed for the gain of the first pair.
    res = sweep_d2d_count(DEFAULT, "new-auction", range(0, 21), 100, 0, workers=1)
    m = {p.x: p.mean_sum_rate for p in res.curve("new-auction")}
    early = (m[5] - m[0]) / 5
    late = (m[20] - m[15]) / 5
    ok = late <= 0.5 * early
    report(
        "C3 saturation (C=4, D=0..20, 100 trials/point)",
        ok,
        f"mean gain per pair D in [1,5]: {early:.4f}; D in [16,20]: {late:.4f}; ratio {late / early:.3f} (<= 0.5)",
    )
    assert ok


def test_c4_oracle_ceiling(report):
    cfg = DEFAULT.replace(num_cellular=3, num_d2d=4)
    violations, ratios = [], []
    for seed in range(100):
        inst = make_instance(cfg, seed)
        g, p = inst.gains, inst.powers
        best = sum_rate(allocate_exhaustive(inst), g, p)
        greedy = allocate_new_auction(inst).final_sum_rate
        rand = sum_rate(allocate_random(inst, seed), g, p)
        ratios.append(greedy / best)
        if not best >= greedy >= rand:
            violations.append(seed)
    ok = not violations
    report(
        "C4 exhaustive >= new-auction >= random (C=3, D=4, 100 instances)",
        ok,
        f"{len(violations)} violations (seeds {violations}); mean new/optimal {np.mean(ratios):.5f}",
    )
    assert ok, f"ordering violated on seeds {violations}"


def test_c5_price_indifference(report):
    changed = []
    for seed in range(50):
        inst = make_instance(DEFAULT.replace(num_d2d=8), seed)
        base = allocate_new_auction(inst)
        for factor in (0.1, 1.0, 10.0):
            params = RicaParams(price_start=factor * base.price_start, price_step=factor * 0.05)
            if allocate_new_auction(inst, params).allocation != base.allocation:
                changed.append((seed, factor))
    ok = not changed
    report("C5 price indifference (50 instances, x0.1/x1/x10)", ok, f"{len(changed)} allocations changed")
    assert ok


def test_c6_numerical_invariants(report):
    rng = np.random.default_rng(2024)
    worst_gain = worst_add = worst_pdf = 0.0
    monotone_bad = removals = 0
    for k in range(200):
        C, D = int(rng.integers(1, 6)), int(rng.integers(1, 11))
        inst = make_instance(DEFAULT.replace(num_cellular=C, num_d2d=D), 10_000 + k)
        g, p = inst.gains, inst.powers
        res = rng.integers(-1, C, size=D)
        alloc = Allocation(tuple(int(r) for r in res))
        # Additivity against the per-link loop oracle.
        exact = oracles.sum_rate(alloc.resources, g, p)
        worst_add = max(worst_add, abs(sum_rate(alloc, g, p) - exact) / exact)
        # Marginal gain against a copy-and-recompute oracle.
        d = int(rng.integers(D))
        c = int(rng.integers(C))
        base = alloc.without(d)
        two = oracles.two_eval_gain(d, c, base.resources, g, p)
        scale = max(sum_rate(base, g, p), sum_rate(base.assign(d, c), g, p))
        worst_gain = max(worst_gain, abs(marginal_gain(d, c, base, g, p) - two) / scale)
    # pdf normalisation over varied samples and bin counts.
    for k in range(200):
        x = rng.normal(0, 10, int(rng.integers(2, 500)))
        worst_pdf = max(worst_pdf, abs(sinr_pdf(x, int(rng.integers(1, 80))).integral() - 1.0))
    # Interference monotonicity on 1000 randomized removals.
    while removals < 1000:
        C, D = int(rng.integers(1, 5)), int(rng.integers(2, 11))
        inst = make_instance(DEFAULT.replace(num_cellular=C, num_d2d=D), int(rng.integers(2**32)))
        g, p = inst.gains, inst.powers
        alloc = Allocation(tuple(int(r) for r in rng.integers(0, C, size=D)))
        gone = int(rng.integers(D))
        c = alloc.resource_of(gone)
        reduced = alloc.without(gone)
        removals += 1
        if sinr_cellular(c, reduced, g, p) < sinr_cellular(c, alloc, g, p):
            monotone_bad += 1
        for other in alloc.pairs_on(c):
            if other != gone and sinr_d2d(other, reduced, g, p) < sinr_d2d(other, alloc, g, p):
                monotone_bad += 1
    ok = worst_gain <= 1e-12 and worst_add <= 1e-9 and worst_pdf <= 1e-9 and monotone_bad == 0
    report(
        "C6 numerical invariants",
        ok,
        f"marginal rel err {worst_gain:.1e}; additivity rel err {worst_add:.1e}; "
        f"pdf |int-1| {worst_pdf:.1e}; monotonicity {monotone_bad} failures / {removals} removals",
    )
    assert ok


def test_c7_ue1_sinr_skewness(tmp_path, report):
    args = ["sinr-stats", "--trials", "2000", "--cellular", "4", "--d2d", "8", "--dump-raw",
            "--out", str(tmp_path)]
    assert main(args) == 0
    header, values = (tmp_path / "ue1_sinr_summary.csv").read_text().splitlines()
    summary = dict(zip(header.split(","), values.split(",")))
    skew = float(summary["skewness"])
    assert math.isfinite(skew)
    flag = "positive, right tail heavier (flagged)" if skew > 0 else "negative, right arm steeper"
    report(
        "C7 UE1 SINR skewness (C=4, D=8, 2000 drops, soft)",
        None,
        f"skewness {skew:+.4f}, {flag}; mean {float(summary['mean_db']):.2f} dB",
    )


@pytest.mark.parametrize(
    "args, files",
    [
        (["sweep", "--allocators", "new-auction,rica,random", "--d2d", "1..6", "--trials", "10",
          "--seed", "3"], ["sweep.csv"]),
        (["compare", "--allocators", "new-auction,rica,random", "--cellular", "3,4", "--d2d", "5",
          "--trials", "10", "--seed", "3"], ["compare.csv", "compare_summary.csv"]),
    ],
)
def test_c8_determinism(tmp_path, report, args, files):
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b")]) == 0
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files)
    report(f"C8 determinism ({args[0]})", same, f"{', '.join(files)} byte-identical: {same}")
    assert same
