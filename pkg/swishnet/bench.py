"""Elementwise activation micro-benchmarks.

Each kind is timed on one seeded single-precision input vector. ReLU, Swish
and SwishReLU have dedicated kernels: SwishReLU evaluates the exponential on
the negative subset only, while Swish pays for it on every element. The other
kinds reuse the reference kernels from ``swishnet.activations``.
"""
import platform
import statistics
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Dict, Iterator, Sequence

import numpy as np
import pandas as pd
import psutil
from pydantic import BaseModel

from .activations import ActivationKind, forward_array, sigmoid_array
from .core.exceptions import ValidationError, invalid_hyperparameter
from .core.settings import settings
from .logger import logger
from .rng import numpy_generator

Kernel = Callable[[np.ndarray], np.ndarray]

MIN_ELEMENTS = 1_000_000
MIN_REPS = 5
VERIFY_POINTS = 10_000
VERIFY_TOL = 1e-6


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def _swish(x: np.ndarray) -> np.ndarray:
    return x * sigmoid_array(x)


def _swishrelu(x: np.ndarray) -> np.ndarray:
    out = x.copy()
    negative = x < 0
    xn = x[negative]
    # xn < 0, so exp cannot overflow
    e = np.exp(xn)
    out[negative] = xn * e / (1 + e)
    return out


KERNELS: Dict[ActivationKind, Kernel] = {
    ActivationKind.RELU: _relu,
    ActivationKind.SWISH: _swish,
    ActivationKind.SWISHRELU: _swishrelu,
}


def kernel_for(kind: ActivationKind) -> Kernel:
    return KERNELS.get(kind, lambda x: forward_array(kind, x))


def verify_kernel(kind: ActivationKind) -> float:
    """Max scaled deviation of the timed kernel from the reference on [-10, 10]; raises above 1e-6."""
    grid = np.linspace(-10.0, 10.0, VERIFY_POINTS, dtype=np.float32)
    got = kernel_for(kind)(grid).astype(np.float64)
    want = forward_array(kind, grid).astype(np.float64)
    deviation = float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))
    if deviation > VERIFY_TOL:
        raise ValidationError(
            f"benchmark kernel for {kind.value} deviates from the reference by {deviation:.3e}",
            params="kind",
        )
    return deviation


def make_inputs(elements: int, sign_mix: float, seed: int) -> np.ndarray:
    """Magnitudes uniform in (0, 6]; each element is negative with probability ``sign_mix``."""
    rng = numpy_generator(seed, stream=0xBE)
    magnitude = 6.0 * (1.0 - rng.random(elements))
    negative = rng.random(elements) < sign_mix
    return np.where(negative, -magnitude, magnitude).astype(np.float32)


def describe_machine() -> str:
    freq = psutil.cpu_freq()
    freq_text = f" @ {freq.max or freq.current:.0f} MHz" if freq else ""
    return (
        f"{platform.system()} {platform.machine()} {platform.processor() or 'cpu'}{freq_text}, "
        f"{psutil.cpu_count(logical=False) or '?'} cores / {psutil.cpu_count(logical=True)} threads, "
        f"{psutil.virtual_memory().total / 2**30:.1f} GiB, python {platform.python_version()}, numpy {np.__version__}"
    )


@contextmanager
def pinned_to_one_cpu() -> Iterator[int | None]:
    """Pin the process to its first allowed CPU where the platform supports affinity."""
    process = psutil.Process()
    if not hasattr(process, "cpu_affinity"):
        yield None
        return
    try:
        original = process.cpu_affinity()
        process.cpu_affinity(original[:1])
    except (psutil.Error, OSError) as e:
        logger.debug(f"cpu affinity unavailable: {e}")
        yield None
        return
    try:
        yield original[0]
    finally:
        process.cpu_affinity(original)


class BenchResult(BaseModel):
    kind: ActivationKind
    elements: int
    sign_mix: float
    reps: int
    ns_per_element: float
    throughput_gelem_s: float
    input_checksum: float
    output_checksum: float


def _check_bench_args(elements: int, sign_mix: float, reps: int) -> None:
    if elements < MIN_ELEMENTS:
        raise invalid_hyperparameter("elements", f"must be at least {MIN_ELEMENTS}")
    if reps < MIN_REPS:
        raise invalid_hyperparameter("reps", f"must be at least {MIN_REPS}")
    if not 0.0 <= sign_mix <= 1.0:
        raise invalid_hyperparameter("sign_mix", "must lie in [0, 1]")


def _time_kernel(kind: ActivationKind, x: np.ndarray, reps: int) -> tuple[float, float]:
    kernel = kernel_for(kind)
    timings: list[int] = []
    checksum = 0.0
    # One extra leading rep warms caches and is discarded
    for rep in range(reps + 1):
        started = time.perf_counter_ns()
        out = kernel(x)
        elapsed = time.perf_counter_ns() - started
        if rep:
            timings.append(elapsed)
            checksum += float(np.sum(out, dtype=np.float64))
    return statistics.median(timings), checksum / reps


def bench_activation(
    kind: ActivationKind,
    elements: int | None = None,
    sign_mix: float | None = None,
    reps: int | None = None,
    seed: int | None = None,
    *,
    inputs: np.ndarray | None = None,
) -> BenchResult:
    kind = ActivationKind.parse(kind)
    elements = elements or settings.bench_elements
    sign_mix = settings.bench_sign_mix if sign_mix is None else sign_mix
    reps = reps or settings.bench_reps
    seed = settings.default_seed if seed is None else seed
    _check_bench_args(elements, sign_mix, reps)
    verify_kernel(kind)
    x = make_inputs(elements, sign_mix, seed) if inputs is None else inputs
    with pinned_to_one_cpu():
        median_ns, checksum = _time_kernel(kind, x, reps)
    result = BenchResult(
        kind=kind,
        elements=elements,
        sign_mix=sign_mix,
        reps=reps,
        ns_per_element=median_ns / elements,
        throughput_gelem_s=elements / median_ns if median_ns else float("inf"),
        input_checksum=float(np.sum(x, dtype=np.float64)),
        output_checksum=checksum,
    )
    logger.debug(f"bench {kind.value}: {result.ns_per_element:.3f} ns/element")
    return result


class BenchReport(BaseModel):
    machine: str
    results: list[BenchResult]

    def ratio(self, kind: ActivationKind) -> float:
        base = next(r for r in self.results if r.kind is ActivationKind.RELU)
        mine = next(r for r in self.results if r.kind is kind)
        return mine.ns_per_element / base.ns_per_element

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([r.model_dump(mode="json") for r in self.results])
        frame["ratio_to_relu"] = [self.ratio(r.kind) for r in self.results]
        return frame

    def write_csv(self, path: Path) -> Path:
        self.to_frame().to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
        return path


def bench_compare(
    kinds: Sequence[ActivationKind],
    *,
    elements: int | None = None,
    sign_mix: float | None = None,
    reps: int | None = None,
    seed: int | None = None,
) -> BenchReport:
    """Time every kind on the same input; ReLU is always measured as the ratio baseline."""
    parsed = list(dict.fromkeys(ActivationKind.parse(k) for k in kinds))
    if len(parsed) < 2:
        raise invalid_hyperparameter("kinds", "a comparison needs at least two distinct activation kinds")
    if ActivationKind.RELU not in parsed:
        parsed.insert(0, ActivationKind.RELU)
    elements = elements or settings.bench_elements
    sign_mix = settings.bench_sign_mix if sign_mix is None else sign_mix
    seed = settings.default_seed if seed is None else seed
    _check_bench_args(elements, sign_mix, reps or settings.bench_reps)
    x = make_inputs(elements, sign_mix, seed)
    machine = describe_machine()
    logger.info(f"benchmarking {', '.join(k.value for k in parsed)} on {elements:,} elements ({machine})")
    results = [bench_activation(kind, elements, sign_mix, reps, seed, inputs=x) for kind in parsed]
    results.sort(key=lambda r: r.ns_per_element)
    return BenchReport(machine=machine, results=results)
