from .config import ArchitectureConfig, PUBLISHED_ARCHITECTURES
from .model import (
    build_model,
    model_forward,
    model_backward,
    loss_and_gradients,
    forward_trace,
    sample_dropout_masks,
    param_count,
)
from .adam import AdamState, adam_step
from .ops import cross_entropy
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "ArchitectureConfig",
    "PUBLISHED_ARCHITECTURES",
    "build_model",
    "model_forward",
    "model_backward",
    "loss_and_gradients",
    "forward_trace",
    "sample_dropout_masks",
    "param_count",
    "AdamState",
    "adam_step",
    "cross_entropy",
    "save_checkpoint",
    "load_checkpoint",
]
