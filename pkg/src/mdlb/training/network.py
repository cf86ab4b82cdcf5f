"""The small stochastic encoder/decoder pair, as plain numpy arrays.

Architecture: one LeakyReLU(0.1) hidden layer feeding separate mean and
log-variance heads (so variances are positive by construction), a latent
sample via the reparameterization ``u = mean + std * noise``, and a
linear-softmax decoder.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..validation import check_feature_matrix

__all__ = [
    "EncoderParams",
    "DecoderParams",
    "ModelParams",
    "init_params",
    "encoder_forward",
    "sample_latent",
    "decoder_log_proba",
    "predict_proba",
    "LEAKY_SLOPE",
]

LEAKY_SLOPE = 0.1


@dataclass
class EncoderParams:
    w_hidden: np.ndarray  # (d_in, h)
    b_hidden: np.ndarray  # (h,)
    w_mean: np.ndarray  # (h, m)
    b_mean: np.ndarray  # (m,)
    w_logvar: np.ndarray  # (h, m)
    b_logvar: np.ndarray  # (m,)


@dataclass
class DecoderParams:
    w_out: np.ndarray  # (m, K)
    b_out: np.ndarray  # (K,)


@dataclass
class ModelParams:
    encoder: EncoderParams
    decoder: DecoderParams

    def copy(self) -> "ModelParams":
        enc = EncoderParams(**{f.name: getattr(self.encoder, f.name).copy() for f in fields(EncoderParams)})
        dec = DecoderParams(**{f.name: getattr(self.decoder, f.name).copy() for f in fields(DecoderParams)})
        return ModelParams(encoder=enc, decoder=dec)

    def arrays(self) -> dict:
        out = {f"encoder.{f.name}": getattr(self.encoder, f.name) for f in fields(EncoderParams)}
        out.update({f"decoder.{f.name}": getattr(self.decoder, f.name) for f in fields(DecoderParams)})
        return out


def init_params(
    d_in: int, hidden: int, latent: int, n_classes: int, rng: np.random.Generator
) -> ModelParams:
    """Scaled-normal weights (Glorot-style fan average), zero biases."""

    def dense(fan_in, fan_out):
        scale = np.sqrt(2.0 / (fan_in + fan_out))
        return rng.normal(0.0, scale, size=(fan_in, fan_out))

    enc = EncoderParams(
        w_hidden=dense(d_in, hidden),
        b_hidden=np.zeros(hidden),
        w_mean=dense(hidden, latent),
        b_mean=np.zeros(latent),
        w_logvar=dense(hidden, latent),
        b_logvar=np.zeros(latent),
    )
    dec = DecoderParams(w_out=dense(latent, n_classes), b_out=np.zeros(n_classes))
    return ModelParams(encoder=enc, decoder=dec)


def _leaky(a: np.ndarray) -> np.ndarray:
    return np.where(a > 0.0, a, LEAKY_SLOPE * a)


def encoder_forward(params: EncoderParams, x) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample latent mean and variance; deterministic in its inputs.

    Raises on non-finite outputs, which signal a diverged model.
    """
    x = check_feature_matrix(x, "x")
    hidden = _leaky(x @ params.w_hidden + params.b_hidden)
    mean = hidden @ params.w_mean + params.b_mean
    logvar = hidden @ params.w_logvar + params.b_logvar
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(logvar))):
        raise FloatingPointError("encoder produced non-finite outputs")
    return mean, np.exp(logvar)


def sample_latent(mean, var, noise) -> np.ndarray:
    """Reparameterized draw ``mean + sqrt(var) * noise`` (elementwise)."""
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if noise.shape != mean.shape or var.shape != mean.shape:
        raise ValueError("mean, var and noise must share a shape")
    return mean + np.sqrt(var) * noise


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def decoder_log_proba(params: DecoderParams, u: np.ndarray) -> np.ndarray:
    """Log class probabilities for latent inputs ``u`` of shape (..., m)."""
    logits = u @ params.w_out + params.b_out
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def predict_proba(
    params: ModelParams, x, latent_samples: int = 12, seed: int = 0
) -> np.ndarray:
    """Class posterior averaged over reparameterized latent samples.

    Deterministic given ``seed``; rows sum to 1.
    """
    mean, var = encoder_forward(params.encoder, x)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((latent_samples,) + mean.shape)
    u = mean[None] + np.sqrt(var)[None] * noise
    proba = _softmax(u @ params.decoder.w_out + params.decoder.b_out)
    return proba.mean(axis=0)
