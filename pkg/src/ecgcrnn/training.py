"""Training loop: 100 epochs of Adam with a plateau LR schedule,
best-validation-accuracy checkpointing, batch-1 evaluation."""

from __future__ import annotations

import copy
import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .nn import (ArchitectureConfig, AdamState, adam_step, build_model,
                 loss_and_gradients, model_forward, sample_dropout_masks)
from .nn.ops import NumericError, cross_entropy
from .windowing import extract_windows, random_augment, record_rng
from .data import make_batches, pad_window_stack
from .metrics import ConfusionMatrix

log = logging.getLogger(__name__)

INITIAL_LR = 5e-4
LR_FLOOR = 1e-5
PATIENCE = 5
EPOCHS = 100
BATCH_SIZE = 50


@dataclass(frozen=True)
class LabeledSignal:
    """A preprocessed (200 Hz, filtered, scaled) signal with its class index."""

    record_id: str
    samples: np.ndarray
    label: int
    fs: float = 200.0

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs


class PlateauScheduler:
    """Halve the learning rate after `patience` epochs without a new best
    validation loss, with a hard floor. The patience counter resets after
    each halving; the rate never increases."""

    def __init__(self, lr: float = INITIAL_LR, patience: int = PATIENCE,
                 floor: float = LR_FLOOR):
        self.lr = lr
        self.patience = patience
        self.floor = floor
        self.best = np.inf
        self.stale = 0

    def update(self, val_loss: float) -> float:
        if val_loss < self.best:
            self.best = val_loss
            self.stale = 0
        else:
            self.stale += 1
            if self.stale >= self.patience:
                self.lr = max(self.lr / 2.0, self.floor)
                self.stale = 0
        return self.lr


def lr_plateau_update(val_loss_history, lr: float = INITIAL_LR,
                      patience: int = PATIENCE, floor: float = LR_FLOOR) -> float:
    """Replay the plateau rule over a full loss history; returns the
    learning rate in force after the last epoch."""
    sched = PlateauScheduler(lr, patience, floor)
    for loss in val_loss_history:
        sched.update(loss)
    return sched.lr


@dataclass
class TrainResult:
    config: ArchitectureConfig
    params: dict  # weights at the best validation-accuracy epoch
    best_epoch: int
    best_val_accuracy: float
    log: list = field(default_factory=list)
    final_params: dict = field(default_factory=dict)


def _predict_one(signal: LabeledSignal, params, config) -> np.ndarray:
    windows = extract_windows(signal.samples, config.window_size, offset=0)
    return model_forward(windows, params, config, mode="eval")


def evaluate(params, config: ArchitectureConfig, signals) -> tuple:
    """Deterministic batch-1 evaluation: no padding, no augmentation.

    Returns (ConfusionMatrix, predictions list aligned with signals).
    """
    k = config.num_classes
    cm = ConfusionMatrix.empty(k)
    preds = []
    for sig in signals:
        probs = _predict_one(sig, params, config)
        pred = int(np.argmax(probs))
        preds.append(pred)
        cm.counts[sig.label, pred] += 1
    return cm, preds


def _validation_pass(signals, params, config) -> tuple:
    losses, correct = [], 0
    for sig in signals:
        probs = _predict_one(sig, params, config)
        losses.append(cross_entropy(probs, sig.label))
        if int(np.argmax(probs)) == sig.label:
            correct += 1
    return float(np.mean(losses)), correct / len(signals)


def train(config: ArchitectureConfig, train_signals, val_signals, seed: int,
          epochs: int = EPOCHS, batch_size: int = BATCH_SIZE,
          lr: float = INITIAL_LR, patience: int = PATIENCE,
          lr_floor: float = LR_FLOOR, sign_flip: bool = True,
          random_offset: bool = True, log_path=None,
          initial_params=None) -> TrainResult:
    """Full training run; deterministic for a given seed.

    Per epoch: duration-sorted batches in a seed-shuffled order, sign-flip
    and random-offset augmentation per signal, forward/backward/Adam, then
    a batch-1 validation pass whose cross-entropy drives the LR schedule
    and whose accuracy drives best-epoch selection (earliest epoch wins
    ties). Aborts on non-finite loss.
    """
    if not train_signals or not val_signals:
        raise ValueError("need non-empty train and validation splits")
    params = initial_params if initial_params is not None else build_model(config, seed)
    best_params = copy.deepcopy(params)
    best_epoch, best_acc = 0, -1.0
    state = AdamState.init(params, lr)
    sched = PlateauScheduler(lr, patience, lr_floor)
    W = config.window_size
    result_log = []

    for epoch in range(1, epochs + 1):
        t0 = time.monotonic()
        epoch_rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([seed, epoch])))
        batches = make_batches(train_signals, batch_size, W, epoch_rng)
        losses, sizes = [], []
        for batch in batches:
            tensors, labels = [], []
            for sig in batch:
                rng = record_rng(seed, epoch, sig.record_id)
                samples, offset = random_augment(
                    sig.samples, W, rng, flip_enabled=sign_flip,
                    offset_enabled=random_offset)
                tensors.append(extract_windows(samples, W, offset))
                labels.append(sig.label)
            windows = pad_window_stack(tensors)
            masks = sample_dropout_masks(config, len(batch), epoch_rng)
            loss, _, grads = loss_and_gradients(
                windows, labels, params, config, masks)
            if not np.isfinite(loss):
                raise NumericError(
                    f"non-finite training loss at epoch {epoch} "
                    f"(lr={state.lr:g}, batch of {len(batch)})")
            adam_step(params, grads, state)
            losses.append(loss)
            sizes.append(len(batch))
        train_loss = float(np.average(losses, weights=sizes))
        val_loss, val_acc = _validation_pass(val_signals, params, config)
        lr_used = state.lr
        state.lr = sched.update(val_loss)
        if val_acc > best_acc:
            best_acc = val_acc
            best_epoch = epoch
            best_params = copy.deepcopy(params)
        entry = {
            "epoch": epoch,
            "lr": lr_used,
            "train_loss": train_loss,
            "val_loss": val_loss,
            "val_acc": val_acc,
            "seconds": round(time.monotonic() - t0, 3),
        }
        result_log.append(entry)
        if log_path is not None:
            with open(log_path, "a") as f:
                f.write(json.dumps(entry) + "\n")
        log.info("epoch %d: lr=%.2g train=%.4f val=%.4f acc=%.4f",
                 epoch, lr_used, train_loss, val_loss, val_acc)

    return TrainResult(config=config, params=best_params, best_epoch=best_epoch,
                       best_val_accuracy=best_acc, log=result_log,
                       final_params=params)
