"""Stochastic swing-equation networks and their bulk (inertia-weighted) dynamics.

Each node obeys

    d theta_i / dt = omega_i
    M_i d omega_i / dt = P_i + Gamma_i(t) - D_i omega_i + sum_j K_ij sin(theta_j - theta_i)

and is integrated with a fixed-step Euler-Maruyama scheme. Noise is white
(Gaussian) or alpha-stable (Levy) and independent across nodes and steps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.signal import lfilter

from ._validation import check_alpha, check_positive, check_skew
from .exceptions import DivergenceError, InhomogeneousDampingError, PowerImbalanceError
from .stable import _cms, sample_stable
from .timeseries import AngularVelocityTrace

__all__ = [
    "GridModel",
    "NoiseSpec",
    "SimResult",
    "build_grid",
    "sample_stable",
    "simulate",
    "bulk_velocity",
    "simulate_bulk",
    "aggregate_noise",
    "energy",
]

DIVERGENCE_LIMIT = 1e6
GAMMA_RTOL = 1e-12
BALANCE_RTOL = 1e-9
STABILITY_GUARD = 0.1
_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class GridModel:
    inertia: np.ndarray
    power: np.ndarray
    damping: np.ndarray
    coupling: np.ndarray

    def __post_init__(self):
        m = np.array(self.inertia, dtype=float, ndmin=1)
        p = np.array(self.power, dtype=float, ndmin=1)
        d = np.array(self.damping, dtype=float, ndmin=1)
        n = len(m)
        k = np.zeros((n, n)) if self.coupling is None else np.array(self.coupling, dtype=float)
        if k.size == 0:
            k = np.zeros((n, n))
        if n == 0 or p.shape != (n,) or d.shape != (n,) or k.shape != (n, n):
            raise ValueError("inconsistent node parameter dimensions")
        if np.any(~np.isfinite(m)) or np.any(m <= 0):
            raise ValueError("inertia M_i must be > 0")
        if np.any(~np.isfinite(d)) or np.any(d <= 0):
            raise ValueError("damping D_i must be > 0")
        if not np.array_equal(k, k.T):
            raise ValueError("coupling matrix K must be symmetric")
        if np.any(k < 0) or np.any(np.diag(k) != 0):
            raise ValueError("coupling must be non-negative with zero diagonal")
        imbalance = p.sum()
        if abs(imbalance) > BALANCE_RTOL * max(np.abs(p).sum(), 1e-300) and imbalance != 0:
            raise PowerImbalanceError(float(imbalance))
        for name, arr in (("inertia", m), ("power", p), ("damping", d), ("coupling", k)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return len(self.inertia)

    @property
    def total_inertia(self) -> float:
        return float(self.inertia.sum())

    @property
    def ratios(self) -> np.ndarray:
        return self.damping / self.inertia

    @property
    def gamma(self) -> float | None:
        """Common damping-to-inertia ratio, or None if it differs between nodes."""
        r = self.ratios
        if np.all(np.abs(r - r[0]) <= GAMMA_RTOL * r[0]):
            return float(r[0])
        return None

    def require_gamma(self) -> float:
        g = self.gamma
        if g is None:
            raise InhomogeneousDampingError(
                f"damping-to-inertia ratio is not homogeneous (range {self.ratios.min():g}..{self.ratios.max():g})"
            )
        return g

    def edges(self):
        i, j = np.nonzero(np.triu(self.coupling, 1))
        return i.astype(np.int64), j.astype(np.int64), self.coupling[i, j].astype(float)


@dataclass(frozen=True, eq=False)
class NoiseSpec:
    """Per-node noise amplitudes.

    For ``kind="gaussian"`` the amplitude is the standard deviation of the
    power noise per unit time. For ``kind="stable"`` the amplitude is the
    Gaussian-equivalent base scale: increments use the stable scale
    ``amplitude / sqrt(2)``, so at ``alpha = 2`` both kinds coincide.
    """

    kind: str
    amplitudes: np.ndarray
    alpha: float = 2.0
    skew: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "stable"):
            raise ValueError(f"noise kind must be 'gaussian' or 'stable', got {self.kind!r}")
        amps = np.array(self.amplitudes, dtype=float, ndmin=1)
        if np.any(~np.isfinite(amps)) or np.any(amps < 0):
            raise ValueError("noise amplitudes must be finite and >= 0")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        alpha = 2.0 if self.kind == "gaussian" else check_alpha(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "skew", check_skew(self.skew) if self.kind == "stable" else 0.0)

    @property
    def stable_scales(self) -> np.ndarray:
        """Per-unit-time scale in the standard stable convention."""
        return self.amplitudes / np.sqrt(2.0)

    def _increments(self, gen, size, dt):
        """Noise increments for ``size`` steps of one node, in units of the amplitude."""
        if self.kind == "gaussian":
            return gen.standard_normal(size) * np.sqrt(dt)
        v = gen.uniform(-np.pi / 2, np.pi / 2, size)
        w = gen.standard_exponential(size)
        # unit Gaussian-equivalent scale -> standard stable scale 1/sqrt(2)
        scale = dt ** (1.0 / self.alpha) / np.sqrt(2.0)
        x = _cms(self.alpha, self.skew, v, w)
        if self.alpha == 1.0 and self.skew != 0.0:
            return scale * x + (2 / np.pi) * self.skew * scale * np.log(scale)
        return scale * x


@dataclass(frozen=True, eq=False)
class SimResult:
    dt: float
    theta: np.ndarray
    omega: np.ndarray
    seed: int | None
    t0: float = 0.0
    record_every: int = 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.omega.shape[1]) * self.dt * self.record_every


def build_grid(config) -> GridModel:
    """Build a validated grid from ``{nodes: [{M, P, D}], coupling: [[i, j, K]]}``."""
    nodes = config["nodes"]
    n = len(nodes)
    k = np.zeros((n, n))
    for entry in config.get("coupling", []) or []:
        i, j, kij = int(entry[0]), int(entry[1]), float(entry[2])
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"invalid coupling edge {entry}")
        k[i, j] = k[j, i] = kij
    return GridModel(
        [float(nd["M"]) for nd in nodes],
        [float(nd.get("P", 0.0)) for nd in nodes],
        [float(nd["D"]) for nd in nodes],
        k,
    )


def noise_from_config(config) -> NoiseSpec:
    spec = config.get("noise", {}) or {}
    kind = spec.get("kind", "gaussian")
    return NoiseSpec(
        kind,
        [float(nd.get("sigma", 0.0)) for nd in config["nodes"]],
        float(spec.get("alpha", 2.0)),
        float(spec.get("skew", 0.0)),
    )


def aggregate_noise(noise: NoiseSpec) -> NoiseSpec:
    """Single amplitude equivalent to the sum of independent node noises."""
    a = noise.amplitudes
    if noise.kind == "gaussian":
        total = np.sqrt(np.sum(a**2))
    else:
        total = np.sum(a**noise.alpha) ** (1.0 / noise.alpha)
    # skew of a sum of equally-skewed terms is unchanged
    return NoiseSpec(noise.kind, [total], noise.alpha, noise.skew)


def energy(grid: GridModel, theta, omega) -> np.ndarray:
    """Kinetic plus potential energy; non-increasing for the noiseless dynamics."""
    theta = np.atleast_2d(np.asarray(theta, float).T).T
    omega = np.atleast_2d(np.asarray(omega, float).T).T
    ei, ej, kv = grid.edges()
    kinetic = 0.5 * np.einsum("i,i...->...", grid.inertia, omega**2)
    potential = -np.einsum("i,i...->...", grid.power, theta)
    if len(kv):
        potential = potential - np.einsum("e,e...->...", kv, np.cos(theta[ej] - theta[ei]))
    return kinetic + potential


@njit(cache=True)
def _em_kernel(theta, omega, inv_m, power, damping, ei, ej, kv, kicks, dt, out_theta, out_omega, stride, phase, n_out):
    n = theta.shape[0]
    coup = np.zeros(n)
    for k in range(kicks.shape[0]):
        for i in range(n):
            coup[i] = 0.0
        for e in range(kv.shape[0]):
            f = kv[e] * np.sin(theta[ej[e]] - theta[ei[e]])
            coup[ei[e]] += f
            coup[ej[e]] -= f
        for i in range(n):
            acc = (power[i] + coup[i] - damping[i] * omega[i]) * inv_m[i]
            theta[i] += omega[i] * dt
            omega[i] += acc * dt + kicks[k, i]
            if not abs(omega[i]) <= 1e6:
                return k, n_out
        phase += 1
        if phase == stride:
            phase = 0
            if n_out < out_omega.shape[1]:
                for i in range(n):
                    out_theta[i, n_out] = theta[i]
                    out_omega[i, n_out] = omega[i]
                n_out += 1
    return -1, n_out


def _check_step(dt, steps, rate):
    dt = check_positive(dt, "dt")
    if int(steps) < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if dt * rate >= STABILITY_GUARD:
        raise ValueError(f"dt * gamma = {dt * rate:g} violates the stability guard (< {STABILITY_GUARD})")
    return dt, int(steps)


def _default_burn_in(rate):
    return 10.0 / rate


def _streams(seed, n):
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def simulate(
    grid: GridModel,
    noise: NoiseSpec,
    dt: float,
    steps: int,
    seed: int | None = 0,
    initial_state=None,
    burn_in_s: float | None = None,
    record_every: int = 1,
) -> SimResult:
    """Integrate the network and record ``steps`` post-burn-in steps.

    ``initial_state`` is ``(theta, omega)``; default is the flat start.
    Burn-in defaults to ``10 / gamma`` of the slowest node. Every node draws
    from its own counter-based stream, so results depend only on ``seed``.
    """
    n = grid.n
    if len(noise.amplitudes) != n:
        raise ValueError(f"noise has {len(noise.amplitudes)} amplitudes for {n} nodes")
    dt, steps = _check_step(dt, steps, grid.ratios.max())
    if burn_in_s is None:
        burn_in_s = _default_burn_in(grid.ratios.min())
    n_burn = int(round(check_positive(burn_in_s, "burn_in_s", strict=False) / dt))
    record_every = int(record_every)
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    if initial_state is None:
        theta, omega = np.zeros(n), np.zeros(n)
    else:
        theta = np.array(initial_state[0], dtype=float).reshape(n)
        omega = np.array(initial_state[1], dtype=float).reshape(n)
    inv_m = 1.0 / grid.inertia
    power = np.ascontiguousarray(grid.power)
    damping = np.ascontiguousarray(grid.damping)
    ei, ej, kv = grid.edges()
    gain = noise.amplitudes * inv_m
    noisy = np.any(gain > 0)
    streams = _streams(seed, n)

    n_rec = steps // record_every
    out_theta = np.empty((n, n_rec))
    out_omega = np.empty((n, n_rec))
    dummy = np.empty((n, 0))
    total = n_burn + steps
    done, n_out, phase = 0, 0, 0
    while done < total:
        # noise is drawn in fixed blocks so the path does not depend on burn-in length
        block = min(_CHUNK, total - done)
        kicks = np.zeros((block, n))
        if noisy:
            for i, gen in enumerate(streams):
                kicks[:, i] = noise._increments(gen, block, dt) * gain[i]
        split = min(max(n_burn - done, 0), block)
        for lo, hi in ((0, split), (split, block)):
            if hi == lo:
                continue
            recording = done + lo >= n_burn
            bad, n_out = _em_kernel(
                theta, omega, inv_m, power, damping, ei, ej, kv, kicks[lo:hi], dt,
                out_theta if recording else dummy, out_omega if recording else dummy,
                record_every if recording else 1 << 62, phase if recording else 0, n_out,
            )  # fmt: skip
            if bad >= 0:
                raise DivergenceError(done + lo + bad)
            if recording:
                phase = (phase + hi - lo) % record_every
        done += block
    out_theta.flags.writeable = False
    out_omega.flags.writeable = False
    return SimResult(dt, out_theta, out_omega, seed, (n_burn + record_every) * dt, record_every)


def bulk_velocity(sim: SimResult, grid: GridModel) -> AngularVelocityTrace:
    """Inertia-weighted mean angular velocity of the recorded trajectories."""
    if grid.gamma is None:
        warnings.warn("damping-to-inertia ratio is inhomogeneous; bulk reduction is not exact", RuntimeWarning, 2)
    w = grid.inertia / grid.total_inertia
    return AngularVelocityTrace(sim.t0, sim.dt * sim.record_every, w @ sim.omega)


def simulate_bulk(
    gamma: float,
    total_inertia: float,
    noise: NoiseSpec,
    dt: float,
    steps: int,
    seed: int | None = 0,
    omega0: float = 0.0,
    burn_in_s: float | None = None,
    record_every: int = 1,
) -> AngularVelocityTrace:
    """Integrate the one-dimensional bulk equation directly.

    ``noise`` must carry a single aggregated amplitude (see
    :func:`aggregate_noise`). Uses the same Euler-Maruyama recursion as
    :func:`simulate`.
    """
    gamma = check_positive(gamma, "gamma")
    total_inertia = check_positive(total_inertia, "total_inertia")
    if len(noise.amplitudes) != 1:
        raise ValueError("simulate_bulk expects a single aggregated noise amplitude")
    dt, steps = _check_step(dt, steps, gamma)
    if burn_in_s is None:
        burn_in_s = _default_burn_in(gamma)
    n_burn = int(round(check_positive(burn_in_s, "burn_in_s", strict=False) / dt))
    record_every = int(record_every)
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    a = 1.0 - gamma * dt
    gain = noise.amplitudes[0] / total_inertia
    gen = _streams(seed, 1)[0]
    state = np.array([a * float(omega0)])
    total = n_burn + steps
    out = np.empty(steps // record_every)
    done, n_out = 0, 0
    while done < total:
        m = min(_CHUNK, total - done)
        kicks = noise._increments(gen, m, dt) * gain if gain > 0 else np.zeros(m)
        y, state = lfilter([1.0], [1.0, -a], kicks, zi=state)
        if not np.all(np.abs(y) <= DIVERGENCE_LIMIT):
            raise DivergenceError(done + int(np.flatnonzero(~(np.abs(y) <= DIVERGENCE_LIMIT))[0]))
        first = max(n_burn - done, 0)
        if first < m:
            # global step index s is recorded when (s - n_burn + 1) % record_every == 0
            start = first + (-(done + first - n_burn + 1)) % record_every
            take = y[start:m:record_every]
            take = take[: len(out) - n_out]
            out[n_out : n_out + len(take)] = take
            n_out += len(take)
        done += m
    return AngularVelocityTrace((n_burn + record_every) * dt, dt * record_every, out)
