"""Numpy implementations of the hot kernels.

Mirrors the compiled ``_ckernels`` module function for function; used when
the extension is not built or ``ENTRODYN_PURE_PYTHON`` is set.
"""
from __future__ import annotations

import numpy as np

from .errors import IntegrationError


def replicator_field(a, x):
    f = a @ x
    return (f - x @ f) * x


def theta_elements(a, x):
    f = a @ x
    mean = x @ f
    X = np.sqrt(np.outer(x, x))
    return 0.5 * f[:, None] * X + 0.5 * f[None, :] * X.T - mean * X


def _rk4(a, x, dt):
    # overflow is reported below as an IntegrationError, not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = replicator_field(a, x)
        k2 = replicator_field(a, x + 0.5 * dt * k1)
        k3 = replicator_field(a, x + 0.5 * dt * k2)
        k4 = replicator_field(a, x + dt * k3)
        y = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y)):
        raise IntegrationError("replicator state became non-finite")
    y = np.clip(y, 0.0, None)
    s = y.sum()
    if not s > 0.0:
        raise IntegrationError("replicator state collapsed to zero mass")
    return y / s


def rk4_step(a, x, dt):
    return _rk4(np.asarray(a, dtype=float), np.asarray(x, dtype=float), float(dt))


def integrate(a, x0, dt, nsteps):
    a = np.asarray(a, dtype=float)
    out = np.empty((nsteps + 1, len(x0)))
    out[0] = x0
    for k in range(nsteps):
        try:
            out[k + 1] = _rk4(a, out[k], dt)
        except IntegrationError as exc:
            raise IntegrationError(str(exc), step=k) from None
    return out


def propagate(rho0, u, damp, nsteps):
    out = np.empty((nsteps + 1,) + rho0.shape, dtype=complex)
    out[0] = rho0
    ud = u.conj().T
    rho = rho0
    for k in range(nsteps):
        if damp is not None:
            rho = damp * rho
        rho = u @ rho @ ud
        if damp is not None:
            rho = damp * rho
        rho = 0.5 * (rho + rho.conj().T)
        out[k + 1] = rho
    return out
