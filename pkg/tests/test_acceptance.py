"""Acceptance gate: ten numbered criteria, each printing one pass/fail line.

Every criterion states its own tolerance and, where relevant, a runtime
budget.  The checks go through the public API plus the command line; nothing
here reaches into private helpers.
"""

import time

import numpy as np

from augbin import (
    Activation,
    NetworkConfig,
    OpCounters,
    SgdConfig,
    SplitMix64,
    bit_width,
    brute_force_check,
    build_network,
    build_onehot_twin,
    decode,
    encode,
    isolation_errors,
    isolation_probe,
    interference_errors,
    lockstep_train,
    probe_inputs,
    read_report,
    run_gradcheck_config,
    synthetic_stream,
    twin_forward_max_diff,
)
from augbin.cli import run as cli_run


def _reference_config(seed: int) -> NetworkConfig:
    """37 categories (6 bits), 3 numeric inputs, 8 sigmoid units, scalar output."""
    return NetworkConfig(
        encoder_kind="augmented",
        n_categories=37,
        n_numeric=3,
        k=8,
        hidden=(1,),
        encoder_activation=Activation.SIGMOID,
        seed=seed,
    )


def test_criterion_01_twin_construction_equivalence(record_criterion):
    started = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        pair = build_onehot_twin(build_network(_reference_config(seed)))
        probes = probe_inputs(1000 + seed, 37, 3, 100)
        worst = max(worst, twin_forward_max_diff(pair, probes))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-12 and elapsed < 5.0
    record_criterion(1, "twin construction equivalence", ok)
    assert ok, f"max forward diff {worst:.3e}, elapsed {elapsed:.2f}s"


def test_criterion_02_lockstep_training_equivalence(record_criterion):
    started = time.perf_counter()
    pair = build_onehot_twin(build_network(_reference_config(0)))
    stream = synthetic_stream(7, 37, 3, 1, 2000)
    trace = lockstep_train(pair, stream, SgdConfig(0.1, 2000))
    final = twin_forward_max_diff(pair, probe_inputs(8, 37, 3, 50))
    elapsed = time.perf_counter() - started
    at_100 = max(trace.max_output_diffs[:101])
    overall = max(max(trace.max_output_diffs), final)
    ok = at_100 <= 1e-10 and overall <= 1e-8 and elapsed < 10.0
    record_criterion(2, "lockstep training equivalence", ok)
    assert ok, (
        f"divergence {at_100:.3e} after 100 steps, {overall:.3e} after 2000, "
        f"elapsed {elapsed:.2f}s"
    )


_PROBE_CONFIGS = (
    (64, 16, 2, (3,)),
    (37, 8, 3, ()),
    (5, 16, 0, (2,)),
    (13, 4, 1, ()),
)


def _contribution_probes(kind):
    """Yield (n_categories, probe) for 250 evolving-state probes per config."""
    for n_categories, k, n_numeric, hidden in _PROBE_CONFIGS:
        net = build_network(
            NetworkConfig(kind, n_categories, n_numeric, k, hidden=hidden, seed=n_categories)
        )
        stream = SplitMix64(7000 + n_categories)
        for _ in range(250):
            category = stream.next_below(n_categories) + 1
            numerics = np.array([stream.next_symmetric(1.0) for _ in range(n_numeric)])
            target = np.array(
                [stream.next_symmetric(1.0) for _ in range(net.output_width)]
            )
            yield n_categories, isolation_probe(net, category, numerics, target, 0.1)


def test_criterion_03_category_isolation(record_criterion):
    worst_off = worst_on = 0.0
    count = 0
    for _, probe in _contribution_probes("augmented"):
        off, on = isolation_errors(probe)
        worst_off = max(worst_off, off)
        worst_on = max(worst_on, on)
        count += 1
    ok = count == 1000 and worst_off <= 1e-12 and worst_on <= 1e-12
    record_criterion(3, "category isolation", ok)
    assert ok, f"off-category {worst_off:.3e}, on-category {worst_on:.3e} over {count} probes"


def test_criterion_04_binary_negative_control(record_criterion):
    worst = witnessed = 0.0
    count = 0
    for n_categories, probe in _contribution_probes("binary"):
        deviation, predicted = interference_errors(probe, bit_width(n_categories))
        worst = max(worst, deviation)
        witnessed = max(witnessed, predicted)
        count += 1
    # every probe config has at least 3 categories, so overlapping bit codes
    # exist and the control must show real interference somewhere
    ok = count == 1000 and worst <= 1e-12 and witnessed > 1e-12
    record_criterion(4, "binary interference control", ok)
    assert ok, f"prediction error {worst:.3e}, witnessed interference {witnessed:.3e}"


def test_criterion_05_gradient_checks(record_criterion):
    results = [run_gradcheck_config(0, index) for index in range(100)]
    ok = all(r.passed and r.entries_checked > 0 for r in results)
    worst = max(r.max_abs_diff for r in results)
    record_criterion(5, "gradient checks", ok)
    assert ok, f"worst |analytic - numeric| {worst:.3e}"


def test_criterion_06_complexity_counters(record_criterion):
    k = 32
    ok = True
    for n_categories in (16, 256, 4096):
        width = bit_width(n_categories)
        categories = (1, 2, 3, n_categories // 2, n_categories - 1, n_categories)
        for kind in ("onehot", "augmented"):
            net = build_network(
                NetworkConfig(
                    kind, n_categories, 0, k,
                    encoder_activation=Activation.IDENTITY, seed=1,
                )
            )
            for category in categories:
                counters = OpCounters()
                net.sgd_step(category, (), np.zeros(k), 0.1, counters)
                ones = category.bit_count()
                if kind == "onehot":
                    ok = ok and counters.encoding_param_updates == k
                    ok = ok and counters.encoding_madds_dense == n_categories * k
                else:
                    ok = ok and counters.encoding_param_updates == (2 * ones + 1) * k
                    ok = ok and counters.encoding_madds_dense == (2 * width + 1) * k
                    ok = ok and (2 * width + 1) * k <= n_categories * k
    record_criterion(6, "complexity counters", ok)
    assert ok


def test_criterion_07_folded_path_agreement(record_criterion, tmp_path):
    net = build_network(NetworkConfig("augmented", 22, 2, 5, hidden=(2,), seed=11))
    stream = SplitMix64(23)
    worst = 0.0
    for index in range(10_000):
        category = stream.next_below(22) + 1
        numerics = np.array([stream.next_symmetric(1.0), stream.next_symmetric(1.0)])
        plain = net.encoder.forward(category, numerics)
        folded = net.encoder.forward_folded(category, numerics)
        worst = max(worst, float(np.max(np.abs(plain - folded))))
        if index % 10 == 0:  # keep the memory matrices moving between evals
            target = np.array(
                [stream.next_symmetric(1.0) for _ in range(net.output_width)]
            )
            net.sgd_step(category, numerics, target, 0.1)

    data = tmp_path / "data.csv"
    assert cli_run(["gen", "--seed", "5", "--categories", "30", "--numeric", "2",
                    "--rows", "60", "--noise", "0.1", "--out", str(data)]) == 0
    plain_report = tmp_path / "plain.json"
    folded_report = tmp_path / "folded.json"
    base = ["train", "--data", str(data), "--encoding", "augmented",
            "--hidden", "6", "--steps", "200", "--lr", "0.1", "--seed", "4"]
    assert cli_run(base + ["--report", str(plain_report)]) == 0
    assert cli_run(base + ["--folded", "--report", str(folded_report)]) == 0
    loss_gap = abs(
        read_report(plain_report)["losses"][-1]
        - read_report(folded_report)["losses"][-1]
    )
    ok = worst <= 1e-12 and loss_gap <= 1e-10
    record_criterion(7, "folded path agreement", ok)
    assert ok, f"per-component gap {worst:.3e}, final-loss gap {loss_gap:.3e}"


def test_criterion_08_bit_utilities(record_criterion):
    ok = True
    for n_categories in range(1, 65536):
        width = bit_width(n_categories)
        # minimal: the width fits N non-zero codes but one bit fewer does not
        ok = ok and 2 ** (width - 1) - 1 < n_categories <= 2**width - 1
    # encode and decode see N only through its bit width, so covering every
    # category at every width 1..16 is exhaustive for all N <= 65535
    for width in range(1, 17):
        for category in range(1, 2**width):
            ok = ok and decode(encode(category, width)) == category
    code = encode(13, bit_width(13))
    ok = ok and code.positions == (1, 3, 4) and code.vector == (1, 0, 1, 1)
    record_criterion(8, "bit utilities", ok)
    assert ok


def test_criterion_09_brute_force_replay(record_criterion):
    ok = True
    worst = 0.0
    for seed in range(20):
        n_categories = 3 + seed % 6
        k = 1 + seed % 4
        report = brute_force_check(n_categories, k, 50, seed, tolerance=1e-12)
        ok = ok and report.passed and report.steps == 50
        worst = max(worst, report.max_abs_err)
    ok = ok and worst <= 1e-12
    record_criterion(9, "brute-force replay", ok)
    assert ok, f"max replay error {worst:.3e}"


def test_criterion_10_verify_determinism(record_criterion, tmp_path):
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    code_a = cli_run(["verify", "--report", str(first)])
    code_b = cli_run(["verify", "--report", str(second)])
    ok = code_a == 0 and code_b == 0 and first.read_bytes() == second.read_bytes()
    record_criterion(10, "verify determinism", ok)
    assert ok
