"""Batch objectives and hand-derived gradients for the three regularizers.

All three objectives share the form

    loss = mean_i [ beta * KL_i  -  log P(y_i | u_i) ]

and differ only in what KL_i is measured against:

    vib             -- the fixed standard normal prior
    cdvib_lossless  -- the closest same-class bank center (full KL)
    cdvib_lossy     -- the split mean/variance divergence to the closest
                       center (the decoder still receives the clean latent)

Gradients flow through the reparameterized latent sample, the softmax
cross-entropy and the closed-form KL; bank centers are constants within a
step (they evolve separately through ``update_bank``).
"""

from __future__ import annotations

import numpy as np

from ..validation import check_labels
from .bank import PriorBank, assign_centers
from .network import LEAKY_SLOPE, DecoderParams, EncoderParams, ModelParams

__all__ = ["objective", "OBJECTIVE_KINDS"]

OBJECTIVE_KINDS = ("vib", "cdvib_lossless", "cdvib_lossy")


def objective(
    params: ModelParams,
    x: np.ndarray,
    y: np.ndarray,
    kind: str,
    bank: PriorBank | None,
    beta: float,
    noise: np.ndarray,
):
    """Loss, gradients and diagnostics for one batch.

    ``noise`` must be a standard-normal array of shape (batch, latent_dim);
    passing it explicitly keeps the function pure (finite-difference checks
    hold it fixed).  Returns ``(loss, grads, aux)`` where ``grads`` mirrors
    the ``ModelParams`` structure and ``aux`` carries the mean KL, the mean
    cross-entropy and the center assignments.
    """
    if kind not in OBJECTIVE_KINDS:
        raise ValueError(f"kind must be one of {OBJECTIVE_KINDS}, got {kind!r}")
    if kind != "vib" and bank is None:
        raise ValueError(f"{kind} needs a prior bank")
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("x must be a nonempty (batch, d_in) array")
    n_classes = params.decoder.w_out.shape[1]
    y = check_labels(y, n_classes)
    if beta < 0.0:
        raise ValueError("beta must be >= 0")
    b = x.shape[0]
    enc, dec = params.encoder, params.decoder

    # forward; divergence surfaces as a non-finite loss below, so numpy's
    # overflow warnings carry no extra information here
    with np.errstate(over="ignore", invalid="ignore"):
        pre_hidden = x @ enc.w_hidden + enc.b_hidden
        hidden = np.where(pre_hidden > 0.0, pre_hidden, LEAKY_SLOPE * pre_hidden)
        mu = hidden @ enc.w_mean + enc.b_mean
        logvar = hidden @ enc.w_logvar + enc.b_logvar
        var = np.exp(logvar)
        std = np.exp(0.5 * logvar)
    if noise.shape != mu.shape:
        raise ValueError("noise must have shape (batch, latent_dim)")

    with np.errstate(over="ignore", invalid="ignore"):
        u = mu + std * noise
        logits = u @ dec.w_out + dec.b_out
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        log_proba = shifted - log_z
        ce = -log_proba[np.arange(b), y]

        if kind == "vib":
            assignments = np.zeros(b, dtype=np.int64)
            kl = 0.5 * np.sum(var + mu**2 - 1.0 - logvar, axis=1)
            dkl_dmu = mu
            dkl_dlogvar = 0.5 * (var - 1.0)
        else:
            assignments = assign_centers(mu, var, y, bank)
            c_mean = bank.means[y, assignments]
            c_var = bank.stds[y, assignments] ** 2
            ratio = var / c_var
            if kind == "cdvib_lossless":
                kl = 0.5 * np.sum(
                    ratio + (mu - c_mean) ** 2 / c_var - 1.0 - np.log(ratio), axis=1
                )
                dkl_dmu = (mu - c_mean) / c_var
            else:
                kl = 0.5 * np.sum((mu - c_mean) ** 2, axis=1) + 0.5 * np.sum(
                    ratio - 1.0 - np.log(ratio), axis=1
                )
                dkl_dmu = mu - c_mean
            dkl_dlogvar = 0.5 * (ratio - 1.0)

        loss = float(np.mean(beta * kl + ce))
    if not np.isfinite(loss):
        raise FloatingPointError("objective produced a non-finite loss")

    # backward
    proba = np.exp(log_proba)
    dlogits = proba.copy()
    dlogits[np.arange(b), y] -= 1.0
    dlogits /= b
    d_w_out = u.T @ dlogits
    d_b_out = dlogits.sum(axis=0)
    du = dlogits @ dec.w_out.T

    dmu = du + (beta / b) * dkl_dmu
    dlogvar = du * noise * (0.5 * std) + (beta / b) * dkl_dlogvar

    d_w_mean = hidden.T @ dmu
    d_b_mean = dmu.sum(axis=0)
    d_w_logvar = hidden.T @ dlogvar
    d_b_logvar = dlogvar.sum(axis=0)
    dhidden = dmu @ enc.w_mean.T + dlogvar @ enc.w_logvar.T
    dpre = dhidden * np.where(pre_hidden > 0.0, 1.0, LEAKY_SLOPE)
    d_w_hidden = x.T @ dpre
    d_b_hidden = dpre.sum(axis=0)

    grads = ModelParams(
        encoder=EncoderParams(
            w_hidden=d_w_hidden,
            b_hidden=d_b_hidden,
            w_mean=d_w_mean,
            b_mean=d_b_mean,
            w_logvar=d_w_logvar,
            b_logvar=d_b_logvar,
        ),
        decoder=DecoderParams(w_out=d_w_out, b_out=d_b_out),
    )
    aux = {
        "kl_mean": float(kl.mean()),
        "cross_entropy_mean": float(ce.mean()),
        "assignments": assignments,
        "latent_mean": mu,
        "latent_var": var,
    }
    return loss, grads, aux
