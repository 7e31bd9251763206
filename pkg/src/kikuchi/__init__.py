"""Spectral algorithms on symmetric-difference matrices for spiked tensor models,
k-XOR refutation and odd-order norm certification, with exact Johnson-scheme oracles."""

from .errors import (
    CapabilityError,
    CapacityError,
    ConfigError,
    InvalidSubsetError,
    ParameterError,
    UndefinedCorrelationError,
)
from .spectral import EigOptions, leading_eig, leading_singular
from .tensor_model import SpikePrior, SubsetTensor, generate, correlation
from .kikuchi_matrix import build
from .detect_recover import detect, recover

__version__ = "0.1.0"
