"""Convolutional-recurrent classifier architecture.

A compact 1-D CNN front end strides across the spectrum to pick up local
band structure, an LSTM reads the resulting feature sequence for
cross-band context, and a small dense head emits four class probabilities.
The stride-heavy convolutions do all the downsampling; there are no
pooling layers anywhere in the stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import NUM_CLASSES


class ModelConfigError(ValueError):
    """Raised when a model configuration violates the architecture contract."""


#: Allowed range for the trainable-parameter count.  The reference
#: configuration lands at 52,660 trainable parameters; anything outside
#: this window means the configuration no longer matches the intended
#: capacity class.
PARAM_WINDOW = (50_000, 60_000)


@dataclass(frozen=True)
class ConvStage:
    """One valid-padding Conv1D stage: ``filters`` maps, ``kernel`` wide, ``stride``."""

    filters: int
    kernel: int
    stride: int

    def output_length(self, input_length: int) -> int:
        if input_length < self.kernel:
            raise ModelConfigError(
                f"input length {input_length} shorter than kernel {self.kernel}"
            )
        return (input_length - self.kernel) // self.stride + 1


@dataclass(frozen=True)
class CnnLstmSpec:
    """Hyperparameters of the classifier.

    Defaults reproduce the reference network: three strided Conv1D stages
    (4 filters each; kernels 8/4/3; strides 4/2/1), a 100-unit LSTM, 0.4
    dropout, a 100-unit relu dense layer, and a 4-way softmax output.
    Convolution weights carry L2 1e-6; dense weights carry L2 1e-5.
    """

    input_length: int = 1024
    conv_stages: tuple[ConvStage, ...] = field(
        default_factory=lambda: (
            ConvStage(4, 8, 4),
            ConvStage(4, 4, 2),
            ConvStage(4, 3, 1),
        )
    )
    lstm_units: int = 100
    dropout_rate: float = 0.4
    dense_units: int = 100
    num_classes: int = NUM_CLASSES
    conv_l2: float = 1e-6
    dense_l2: float = 1e-5

    def conv_output_lengths(self) -> list[int]:
        """Sequence lengths after each convolution stage."""
        lengths = []
        length = self.input_length
        for stage in self.conv_stages:
            length = stage.output_length(length)
            lengths.append(length)
        return lengths


def build_model(spec: CnnLstmSpec = CnnLstmSpec()):
    """Construct and return the compiled-free Keras model for ``spec``.

    Raises :class:`ModelConfigError` if the resulting network's trainable
    parameter count falls outside :data:`PARAM_WINDOW` — a guard against
    silently evaluating a different capacity class than intended.
    """
    # Imported here so the data loaders stay usable without TensorFlow.
    from tensorflow import keras

    spec.conv_output_lengths()  # validates stage/kernel compatibility
    layers: list = [keras.Input(shape=(spec.input_length, 1))]
    for stage in spec.conv_stages:
        layers.append(
            keras.layers.Conv1D(
                filters=stage.filters,
                kernel_size=stage.kernel,
                strides=stage.stride,
                padding="valid",
                activation="relu",
                kernel_regularizer=keras.regularizers.l2(spec.conv_l2),
                bias_regularizer=keras.regularizers.l2(spec.conv_l2),
            )
        )
    layers.append(keras.layers.LSTM(spec.lstm_units))
    layers.append(keras.layers.Dropout(spec.dropout_rate))
    layers.append(
        keras.layers.Dense(
            spec.dense_units,
            activation="relu",
            kernel_regularizer=keras.regularizers.l2(spec.dense_l2),
            bias_regularizer=keras.regularizers.l2(spec.dense_l2),
        )
    )
    layers.append(
        keras.layers.Dense(
            spec.num_classes,
            activation="softmax",
            kernel_regularizer=keras.regularizers.l2(spec.dense_l2),
            bias_regularizer=keras.regularizers.l2(spec.dense_l2),
        )
    )
    model = keras.Sequential(layers)
    n_params = trainable_parameter_count(model)
    lo, hi = PARAM_WINDOW
    if not lo <= n_params <= hi:
        raise ModelConfigError(
            f"trainable parameter count {n_params} outside [{lo}, {hi}]"
        )
    return model


def trainable_parameter_count(model) -> int:
    """Total number of trainable scalar weights in ``model``."""
    return int(sum(int(np.prod(w.shape)) for w in model.trainable_weights))


def prepare_inputs(features: np.ndarray) -> np.ndarray:
    """Add the trailing channel axis Conv1D expects: ``(n, bins) -> (n, bins, 1)``."""
    x = np.asarray(features, dtype=np.float32)
    if x.ndim == 2:
        return x[..., np.newaxis]
    if x.ndim == 3 and x.shape[-1] == 1:
        return x
    raise ModelConfigError(f"expected (n, bins) features, got shape {x.shape}")
