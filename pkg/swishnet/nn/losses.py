"""Sparse categorical cross-entropy over softmax probabilities."""
import numpy as np

from ..core.exceptions import dimension_mismatch, label_out_of_range, rank_mismatch
from ..tensor import Tensor
from .layers import softmax_forward

# Probabilities are floored here before the log
PROB_FLOOR = 1e-12


def _check_labels(probs: Tensor, labels: np.ndarray) -> np.ndarray:
    if probs.ndim != 2:
        raise rank_mismatch("sparse_ce_loss", 2, probs.shape)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (probs.shape[0],):
        raise dimension_mismatch("sparse_ce_loss", probs.shape, labels.shape)
    class_count = probs.shape[1]
    bad = (labels < 0) | (labels >= class_count)
    if bad.any():
        raise label_out_of_range(int(labels[bad][0]), class_count)
    return labels


def sparse_ce_loss(probs: Tensor, labels: np.ndarray) -> float:
    """Mean of -log(p[i, labels[i]]) over the batch."""
    labels = _check_labels(probs, labels)
    picked = probs[np.arange(probs.shape[0]), labels]
    return float(np.mean(-np.log(np.maximum(picked, PROB_FLOOR))))


def softmax_ce_backward(probs: Tensor, labels: np.ndarray) -> Tensor:
    """Gradient of the mean loss with respect to the softmax input: (p - onehot) / batch."""
    labels = _check_labels(probs, labels)
    grad = probs.copy()
    grad[np.arange(probs.shape[0]), labels] -= 1
    grad /= probs.shape[0]
    return grad


__all__ = ["PROB_FLOOR", "softmax_forward", "sparse_ce_loss", "softmax_ce_backward"]
