import numpy as np
import pandas as pd
import psutil
import pytest

import swishnet.bench as bench
from swishnet.activations import ActivationKind
from swishnet.bench import (
    MIN_ELEMENTS,
    bench_activation,
    bench_compare,
    describe_machine,
    make_inputs,
    pinned_to_one_cpu,
    verify_kernel,
)
from swishnet.core.error_codes import ErrorCode
from swishnet.core.exceptions import ConfigurationError, ValidationError


@pytest.mark.parametrize("kind", list(ActivationKind))
def test_timed_kernels_match_reference(kind):
    assert verify_kernel(kind) <= 1e-6


class TestInputs:
    def test_seeded_and_in_range(self):
        x = make_inputs(10_000, 0.5, seed=1)
        assert x.dtype == np.float32
        np.testing.assert_array_equal(x, make_inputs(10_000, 0.5, seed=1))
        assert np.abs(x).max() <= 6.0
        assert (x != 0).all()

    @pytest.mark.parametrize("mix", [0.0, 1.0])
    def test_sign_mix_extremes(self, mix):
        x = make_inputs(1000, mix, seed=2)
        assert ((x < 0).mean()) == mix

    def test_sign_mix_proportion(self):
        assert abs((make_inputs(100_000, 0.3, seed=3) < 0).mean() - 0.3) < 0.01


class TestBenchActivation:
    def test_result_fields(self):
        result = bench_activation(ActivationKind.SWISHRELU, MIN_ELEMENTS, 0.5, 5, seed=4)
        assert result.kind is ActivationKind.SWISHRELU
        assert result.elements == MIN_ELEMENTS
        assert result.reps == 5
        assert result.ns_per_element > 0
        assert result.throughput_gelem_s > 0

    def test_relu_output_checksum(self):
        x = make_inputs(MIN_ELEMENTS, 0.5, seed=5)
        result = bench_activation(ActivationKind.RELU, MIN_ELEMENTS, 0.5, 5, seed=5)
        expected = float(np.sum(np.maximum(x, 0), dtype=np.float64))
        assert result.output_checksum == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize(
        "kwargs",
        [{"elements": MIN_ELEMENTS - 1}, {"reps": 4}, {"sign_mix": 1.5}, {"sign_mix": -0.1}],
    )
    def test_rejects_invalid_arguments(self, kwargs):
        args = {"elements": MIN_ELEMENTS, "sign_mix": 0.5, "reps": 5} | kwargs
        with pytest.raises(ConfigurationError) as exc:
            bench_activation(ActivationKind.RELU, **args)
        assert exc.value.error_code == ErrorCode.INVALID_HYPERPARAMETER.value

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            bench_activation("mish", MIN_ELEMENTS, 0.5, 5)


class TestBenchCompare:
    def test_relu_baseline_is_added_and_results_sorted(self):
        report = bench_compare(["swish", "swishrelu"], elements=MIN_ELEMENTS, reps=5, seed=6)
        kinds = {r.kind for r in report.results}
        assert kinds == {ActivationKind.RELU, ActivationKind.SWISH, ActivationKind.SWISHRELU}
        timings = [r.ns_per_element for r in report.results]
        assert timings == sorted(timings)
        assert report.ratio(ActivationKind.RELU) == 1.0
        frame = report.to_frame()
        assert list(frame["kind"]) == [r.kind.value for r in report.results]
        assert "ratio_to_relu" in frame.columns

    def test_needs_two_kinds(self):
        with pytest.raises(ConfigurationError):
            bench_compare(["relu", "relu"], elements=MIN_ELEMENTS, reps=5)

    def test_all_kinds_share_one_input(self):
        report = bench_compare(["relu", "tanh"], elements=MIN_ELEMENTS, reps=5, seed=7)
        assert len({r.input_checksum for r in report.results}) == 1

    def test_csv_reads_back_to_the_report(self, tmp_path):
        report = bench_compare(["swish", "swishrelu"], elements=MIN_ELEMENTS, reps=5, seed=8)
        frame = pd.read_csv(report.write_csv(tmp_path / "bench.csv"))
        assert frame["kind"].tolist() == [r.kind.value for r in report.results]
        for row, result in zip(frame.itertuples(), report.results):
            assert row.elements == result.elements
            assert row.reps == result.reps
            assert row.sign_mix == pytest.approx(result.sign_mix)
            assert row.ns_per_element == pytest.approx(result.ns_per_element, abs=1e-6)
            assert row.throughput_gelem_s == pytest.approx(result.throughput_gelem_s, abs=1e-6)
            assert row.output_checksum == pytest.approx(result.output_checksum, abs=1e-6)
            assert row.ratio_to_relu == pytest.approx(report.ratio(result.kind), abs=1e-6)


def test_warm_up_rep_is_not_timed_or_summed(monkeypatch):
    calls = []

    def kernel(x):
        calls.append(len(calls))
        return np.full_like(x, 100.0 if len(calls) == 1 else 1.0)

    monkeypatch.setattr(bench, "kernel_for", lambda kind: kernel)
    median_ns, checksum = bench._time_kernel(ActivationKind.RELU, np.zeros(10, dtype=np.float32), 5)
    assert len(calls) == 6
    assert checksum == 10.0
    assert median_ns >= 0


def test_machine_description_mentions_numpy():
    assert f"numpy {np.__version__}" in describe_machine()


def test_affinity_is_restored():
    process = psutil.Process()
    if not hasattr(process, "cpu_affinity"):
        pytest.skip("platform has no cpu affinity")
    before = process.cpu_affinity()
    with pinned_to_one_cpu() as cpu:
        if cpu is not None:
            assert process.cpu_affinity() == [cpu]
    assert process.cpu_affinity() == before


@pytest.mark.slow
def test_cost_ordering():
    report = bench_compare(["relu", "swish", "swishrelu"], elements=10_000_000, sign_mix=0.5, reps=9, seed=42)
    ns = {r.kind: r.ns_per_element for r in report.results}
    assert ns[ActivationKind.SWISHRELU] <= ns[ActivationKind.SWISH]
    assert ns[ActivationKind.RELU] <= 1.6 * ns[ActivationKind.SWISHRELU]


@pytest.mark.slow
def test_swishrelu_tracks_relu_on_non_negative_inputs():
    report = bench_compare(["relu", "swishrelu"], elements=10_000_000, sign_mix=0.0, reps=9, seed=42)
    assert report.ratio(ActivationKind.SWISHRELU) <= 1.5
