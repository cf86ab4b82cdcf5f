"""Desk-scale encoder/decoder training with learned Gaussian prior banks."""

from .bank import PriorBank, assign_centers, per_sample_kl, update_bank
from .data import Dataset, GeneratorSpec, bayes_accuracy, synth_dataset
from .estimator import CDVIBClassifier
from .loop import OBJECTIVES, TrainConfig, TrainingDiverged, TrainResult, train
from .network import (
    DecoderParams,
    EncoderParams,
    ModelParams,
    decoder_log_proba,
    encoder_forward,
    init_params,
    predict_proba,
    sample_latent,
)
from .objective import objective

__all__ = [
    "Dataset",
    "GeneratorSpec",
    "synth_dataset",
    "bayes_accuracy",
    "EncoderParams",
    "DecoderParams",
    "ModelParams",
    "init_params",
    "encoder_forward",
    "sample_latent",
    "decoder_log_proba",
    "predict_proba",
    "PriorBank",
    "assign_centers",
    "update_bank",
    "per_sample_kl",
    "objective",
    "OBJECTIVES",
    "TrainConfig",
    "TrainResult",
    "TrainingDiverged",
    "train",
    "CDVIBClassifier",
]
