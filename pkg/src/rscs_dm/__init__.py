"""Random-subcarrier-selection OFDM directional modulation simulator."""

from .core import ConfigError, Position, SystemConfig, load_config, validate_config
from .rscs import SubcarrierSelection, draw_selection, schedule, uniform_selection
from .steering import correlation, steering_vector
from .precoder import assemble_codeword, null_space_projector, phase_alignment
from .sinr import sinr_general, sinr_map
from .analysis import secrecy_rate_numerical, secrecy_rate_theoretical

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "Position", "SystemConfig", "load_config", "validate_config",
    "SubcarrierSelection", "draw_selection", "schedule", "uniform_selection",
    "correlation", "steering_vector", "assemble_codeword", "null_space_projector",
    "phase_alignment", "sinr_general", "sinr_map", "secrecy_rate_numerical",
    "secrecy_rate_theoretical", "__version__",
]
