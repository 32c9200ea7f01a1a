from .layers import ActivationLayer, Conv1d, Dense, Gru, Lstm, SimpleRnn
from .network import (CONV_KINDS, NEURAL_KINDS, RECURRENT_KINDS, ConvConfig,
                      ModelSpec, Network, TrainConfig, forward_mlp,
                      mse_loss_and_gradients, network_from_dict,
                      network_to_dict)
from .training import (ACTIVATION_CANDIDATES, TrainedNetwork,
                       TrainingDivergedError, grid_search_activation, train)

__all__ = [
    "ActivationLayer", "Conv1d", "Dense", "Gru", "Lstm", "SimpleRnn",
    "CONV_KINDS", "NEURAL_KINDS", "RECURRENT_KINDS", "ConvConfig",
    "ModelSpec", "Network", "TrainConfig", "forward_mlp",
    "mse_loss_and_gradients", "network_from_dict", "network_to_dict",
    "ACTIVATION_CANDIDATES", "TrainedNetwork", "TrainingDivergedError",
    "grid_search_activation", "train",
]
