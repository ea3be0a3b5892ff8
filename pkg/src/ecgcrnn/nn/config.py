"""Architecture configuration for the conv-recurrent ECG classifiers."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict


class ConfigurationError(ValueError):
    pass


# The three published architectures: (window_size, conv_layers).
PUBLISHED_ARCHITECTURES = ((512, 7), (1024, 7), (1024, 8))


@dataclass(frozen=True)
class ArchitectureConfig:
    """Hyperparameters that fully determine model shapes.

    The canonical models use window sizes 512 or 1024 with 7 or 8 conv
    layers; smaller truncated variants are allowed for tests and quick
    experiments via ``strict=False``.
    """

    window_size: int = 1024
    conv_layers: int = 7
    num_classes: int = 4
    kernel_size: int = 5
    pool_size: int = 2
    first_channels: int = 8
    lstm_units: int = 128
    dropout_rate: float = 0.5
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.window_size % 2 != 0:
            raise ConfigurationError("window size must be even (50% overlap stride)")
        if self.num_classes < 2:
            raise ConfigurationError("need at least two classes")
        if self.window_size % (self.pool_size ** self.conv_layers) != 0:
            raise ConfigurationError(
                f"window size {self.window_size} not divisible by "
                f"{self.pool_size}^{self.conv_layers}"
            )
        if self.strict and (self.window_size, self.conv_layers) not in PUBLISHED_ARCHITECTURES:
            raise ConfigurationError(
                f"unsupported (window_size, conv_layers) pair "
                f"({self.window_size}, {self.conv_layers}); "
                f"supported: {PUBLISHED_ARCHITECTURES}"
            )

    @property
    def head(self) -> str:
        """'logistic' with two classes, 'softmax' otherwise."""
        return "logistic" if self.num_classes == 2 else "softmax"

    def channels_at(self, layer: int) -> int:
        """Output channels of conv layer ``layer`` (1-based): 8, 16, 32, ..."""
        return self.first_channels * 2 ** (layer - 1)

    def width_at(self, layer: int) -> int:
        """Window width after conv layer ``layer`` (1-based)."""
        return self.window_size // self.pool_size ** layer

    @property
    def feature_dim(self) -> int:
        """Per-window feature size after global average pooling."""
        return self.channels_at(self.conv_layers)

    @property
    def head_outputs(self) -> int:
        return 1 if self.head == "logistic" else self.num_classes

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("strict")
        return d

    @classmethod
    def from_dict(cls, d: dict, strict: bool = False) -> "ArchitectureConfig":
        return cls(strict=strict, **d)
