"""Central-difference verification of backpropagated gradients."""
import numpy as np
from pydantic import BaseModel, Field

from ..core.exceptions import invalid_hyperparameter
from ..core.settings import settings
from ..logger import logger
from ..rng import numpy_generator
from ..tensor import Precision, Tensor
from .losses import sparse_ce_loss
from .layers import Activation, Layer, MaxPool2D
from .model import Model

# Relative errors are taken against max(|analytic|, |numeric|, ABS_FLOOR) so
# entries whose true gradient is ~0 are judged by absolute error instead.
ABS_FLOOR = 1e-6


class GradCheckEntry(BaseModel):
    layer_index: int
    layer: str
    parameter: str
    checked: int
    skipped: int = 0
    max_rel_error: float
    worst_position: int
    passed: bool

    @property
    def unchecked(self) -> bool:
        return self.checked == 0


class GradCheckReport(BaseModel):
    h: float
    tol: float
    kink_guard: bool = True
    entries: list[GradCheckEntry] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def max_rel_error(self) -> float:
        return max((entry.max_rel_error for entry in self.entries), default=0.0)

    def failing(self) -> list[GradCheckEntry]:
        return [entry for entry in self.entries if not entry.passed]

    def render(self) -> str:
        lines = [f"{'layer':<40} {'param':<7} {'checked':>7} {'skipped':>7} {'max_rel_err':>12}  status"]
        for e in self.entries:
            status = "ok" if e.passed else ("UNCHECKED" if e.unchecked else "FAIL")
            lines.append(
                f"[{e.layer_index:2d}] {e.layer:<35} {e.parameter:<7} {e.checked:>7} {e.skipped:>7} "
                f"{e.max_rel_error:>12.3e}  {status}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} (tol {self.tol:g}, h {self.h:g})")
        return "\n".join(lines)


def _has_kink(layer: Layer) -> bool:
    return isinstance(layer, MaxPool2D) or (isinstance(layer, Activation) and layer.piecewise)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), ABS_FLOOR)
    return np.abs(analytic - numeric) / scale


def grad_check(
    model: Model,
    x: Tensor,
    labels: np.ndarray,
    h: float = 1e-5,
    tol: float = 1e-4,
    *,
    max_entries: int = 200,
    seed: int | None = None,
    kink_guard: bool = True,
) -> GradCheckReport:
    """Compare analytic gradients against central differences of the loss.

    Each parameter tensor contributes at most ``max_entries`` seeded sample
    positions. With ``kink_guard`` a position is skipped when its +h and -h
    evaluations put some piecewise activation input on opposite sides of 0 or
    move the winner of some max-pool window; there the central difference is
    not a derivative. A tensor whose sampled positions were all skipped is
    reported as unchecked and fails. Failures are reported per tensor, never
    raised.
    """
    if model.precision is not Precision.DOUBLE:
        raise invalid_hyperparameter("precision", "gradient checks run on a double-precision model")
    if h <= 0:
        raise invalid_hyperparameter("h", "must be positive")
    if tol < 0:
        raise invalid_hyperparameter("tol", "must not be negative")
    if max_entries < 1:
        raise invalid_hyperparameter("max_entries", "must be at least 1")
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    rng = numpy_generator(settings.default_seed if seed is None else seed, stream=0x6C)
    guarded = [layer for layer in model.layers if _has_kink(layer)] if kink_guard else []

    probs = model.forward(x)
    analytic = {key: g.copy() for key, g in model.backward(probs, labels).items()}

    def loss() -> tuple[float, list[np.ndarray]]:
        value = sparse_ce_loss(model.forward(x), labels)
        return value, [layer.branch_mask() for layer in guarded]

    report = GradCheckReport(h=h, tol=tol, kink_guard=kink_guard)
    for index, name, param in model.parameters():
        flat = param.reshape(-1)
        grad_flat = analytic[(index, name)].reshape(-1)
        count = min(flat.size, max_entries)
        positions = np.sort(rng.choice(flat.size, size=count, replace=False))
        numeric = np.empty(count, dtype=np.float64)
        smooth = np.ones(count, dtype=bool)
        for k, pos in enumerate(positions):
            original = flat[pos]
            flat[pos] = original + h
            plus, plus_masks = loss()
            flat[pos] = original - h
            minus, minus_masks = loss()
            flat[pos] = original
            numeric[k] = (plus - minus) / (2.0 * h)
            smooth[k] = all(np.array_equal(a, b) for a, b in zip(plus_masks, minus_masks))
        kept = positions[smooth]
        errors = relative_error(grad_flat[kept], numeric[smooth])
        worst = int(np.argmax(errors)) if kept.size else 0
        entry = GradCheckEntry(
            layer_index=index,
            layer=model.layers[index].describe(),
            parameter=name,
            checked=int(kept.size),
            skipped=int(count - kept.size),
            max_rel_error=float(errors[worst]) if kept.size else 0.0,
            worst_position=int(kept[worst]) if kept.size else -1,
            passed=bool(kept.size > 0 and errors[worst] <= tol),
        )
        if entry.skipped:
            logger.debug(f"layer {index} {entry.layer}.{name}: {entry.skipped} positions straddle a kink")
        if entry.unchecked:
            logger.warning(f"layer {index} {entry.layer}.{name}: every sampled position straddles a kink")
        elif not entry.passed:
            logger.warning(
                f"gradient mismatch in layer {index} {entry.layer}.{name}: "
                f"rel err {entry.max_rel_error:.3e} at flat index {entry.worst_position}"
            )
        report.entries.append(entry)
    logger.info(f"gradient check {'passed' if report.passed else 'failed'}: max rel err {report.max_rel_error:.3e}")
    return report
