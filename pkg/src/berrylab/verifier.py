"""Verification protocol for thresholded instances with an interval promise.

The verifier receives a witness state for an instance carrying an energy
threshold E_th and a promise interval (a, b, delta):

1. Energy gate: estimate <H(0)> of the witness by phase estimation on
   exp(-i H(0) tau) and pass iff the estimate is below E_th + Delta_min/4,
   where Delta_min is the measured spectral gap at lambda = 0.  tau is
   fixed at pi / (||H|| + 1) so every eigenphase sits strictly inside
   (-pi, pi) and no wraparound aliasing can occur.
2. If the gate fails, the verifier accepts with probability 1/3 - Delta
   (a seeded coin recorded in the transcript; Delta defaults to 1/12).
3. If the gate passes, the two-runtime phase algorithm estimates theta_B
   starting from the witness as guiding state, and the interval decision
   maps output 1 to certain acceptance and output 0 to acceptance with
   probability exactly 1/3 (again a recorded coin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .angles import wrap_pm_pi
from .bpe import BpeConfig, decide_interval, run_bpe
from .dynamics import StateVector
from .errors import ConfigError
from .hamiltonians import eval_hamiltonian
from .qpe import QpeDistribution, bits_for_precision, distribution_from_phases, sample_outcomes

DEFAULT_ENERGY_REPETITIONS = 15
DEFAULT_SOUNDNESS_DELTA = 1.0 / 12.0


@dataclass(frozen=True)
class VerifierConfig:
    """Knobs for one protocol run."""

    soundness_delta: float = DEFAULT_SOUNDNESS_DELTA
    energy_repetitions: int = DEFAULT_ENERGY_REPETITIONS
    energy_precision: float | None = None  # default: Delta_min / 4
    bpe: BpeConfig = field(default_factory=BpeConfig)

    def __post_init__(self):
        if not 0.0 < self.soundness_delta < 1.0 / 3.0 + 1e-12:
            raise ConfigError(
                f"soundness margin must lie in (0, 1/3], got {self.soundness_delta}"
            )
        if self.energy_repetitions < 1:
            raise ConfigError("energy_repetitions must be positive")


@dataclass
class VerifierOutcome:
    energy_estimate: float
    energy_pass: bool
    theta_estimate: float | None  # present iff energy_pass
    decision: str  # 'accept-1' | 'accept-prob-bounded' | 'reject'
    transcript: list
    accept: bool
    accept_probability: float

    def to_json_dict(self) -> dict:
        return {
            "energy_estimate": self.energy_estimate,
            "energy_pass": self.energy_pass,
            "theta_estimate": self.theta_estimate,
            "decision": self.decision,
            "accept": self.accept,
            "accept_probability": self.accept_probability,
            "transcript": self.transcript,
        }


class EnergyDistribution(NamedTuple):
    """Precomputed QPE outcome distribution for one (instance, witness)."""

    distribution: QpeDistribution
    tau: float
    m: int
    delta_min: float
    ground_energy: float


def _as_amplitudes(witness_state) -> np.ndarray:
    if isinstance(witness_state, StateVector):
        return witness_state.amplitudes
    vec = np.asarray(witness_state, dtype=complex)
    n = np.linalg.norm(vec)
    if abs(n - 1.0) > 1e-8:
        raise ConfigError(f"witness state norm {n:.3g} is not 1")
    return vec


def energy_distribution(instance, witness_state, precision: float | None = None) -> EnergyDistribution:
    """Diagonalize H(0) and build the exact QPE outcome distribution for the
    witness.  Heavy (one dense eigh); reuse across seeds."""
    psi = _as_amplitudes(witness_state)
    H = eval_hamiltonian(instance.family, 0.0)
    if H.shape[0] != psi.size:
        raise ConfigError(
            f"witness dimension {psi.size} does not match instance "
            f"dimension {H.shape[0]}"
        )
    evals, vecs = np.linalg.eigh(H)
    delta_min = float(evals[1] - evals[0])
    if delta_min <= 0:
        raise ConfigError("instance has a degenerate ground space at lambda=0")
    if precision is None:
        precision = delta_min / 4.0
    if precision > delta_min / 4.0 * (1.0 + 1e-9):
        raise ConfigError(
            f"energy precision {precision:.3g} exceeds Delta_min/4 = "
            f"{delta_min / 4.0:.3g}"
        )
    tau = math.pi / (float(np.max(np.abs(evals))) + 1.0)
    m = bits_for_precision(tau * precision)
    weights = np.abs(vecs.conj().T @ psi) ** 2
    phases = np.mod(-evals * tau, 2.0 * math.pi)
    dist = distribution_from_phases(phases, weights, m)
    return EnergyDistribution(dist, tau, m, delta_min, float(evals[0]))


def _energy_from_outcome(outcome: int, m: int, tau: float) -> float:
    theta = 2.0 * math.pi * outcome / 2 ** m
    return -wrap_pm_pi(theta) / tau


def energy_test(
    instance,
    witness_state,
    E_th: float | None = None,
    precision: float | None = None,
    *,
    seed=0,
    repetitions: int = DEFAULT_ENERGY_REPETITIONS,
    distribution: EnergyDistribution | None = None,
) -> tuple[float, bool]:
    """Median-of-repetitions energy estimate and the threshold gate.

    Returns (estimate, passed) with passed iff
    estimate < E_th + Delta_min/4.  Pass `distribution` (from
    energy_distribution) to amortize the diagonalization across seeds.
    """
    if E_th is None:
        E_th = instance.E_th
    if E_th is None:
        raise ConfigError("instance carries no energy threshold")
    if distribution is None:
        distribution = energy_distribution(instance, witness_state, precision)
    dist, tau, m, delta_min, _ = distribution
    rng = np.random.default_rng(seed)
    outcomes = sample_outcomes(dist, repetitions, rng)
    energies = [_energy_from_outcome(j, m, tau) for j in outcomes]
    estimate = float(np.median(energies))
    passed = estimate < E_th + delta_min / 4.0
    return estimate, passed


def run_verifier(
    instance,
    witness_state,
    config: VerifierConfig | None = None,
    seed=0,
    *,
    energy_dist: EnergyDistribution | None = None,
    bpe_engine=None,
) -> VerifierOutcome:
    """One full protocol run: energy gate, phase estimation, decision.

    ``energy_dist`` and ``bpe_engine`` amortize the dense diagonalization and
    the loop-propagator construction across seeds: pass the outputs of
    energy_distribution(...) and BpeEngine(instance.family, config.bpe,
    guiding_state=witness) when sweeping many runs on one instance.
    """
    if config is None:
        config = VerifierConfig()
    a, b, delta = instance.interval
    if instance.E_th is None:
        raise ConfigError("instance carries no energy threshold")

    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    energy_seed, bpe_seed, coin_seed = ss.spawn(3)

    if energy_dist is None:
        energy_dist = energy_distribution(
            instance, witness_state, config.energy_precision
        )
    estimate, passed = energy_test(
        instance,
        witness_state,
        seed=energy_seed,
        repetitions=config.energy_repetitions,
        distribution=energy_dist,
    )
    transcript = [
        {
            "step": "energy-test",
            "estimate": estimate,
            "threshold": instance.E_th,
            "margin": energy_dist.delta_min / 4.0,
            "repetitions": config.energy_repetitions,
            "pass": passed,
        }
    ]

    coin_rng = np.random.default_rng(coin_seed)
    if not passed:
        p = 1.0 / 3.0 - config.soundness_delta
        if p <= 0.0:
            decision, accept, coin = "reject", False, None
        else:
            decision = "accept-prob-bounded"
            coin = float(coin_rng.random())
            accept = coin < p
        transcript.append(
            {
                "step": "decision",
                "branch": "energy-fail",
                "decision": decision,
                "accept_probability": max(p, 0.0),
                "coin": coin,
                "accept": accept,
            }
        )
        return VerifierOutcome(
            energy_estimate=estimate,
            energy_pass=False,
            theta_estimate=None,
            decision=decision,
            transcript=transcript,
            accept=accept,
            accept_probability=max(p, 0.0),
        )

    if bpe_engine is not None:
        theta_B, theta_D, diagnostics = bpe_engine.run(bpe_seed)
    else:
        theta_B, theta_D, diagnostics = run_bpe(
            instance.family,
            initial_ground_state=_as_amplitudes(witness_state),
            config=config.bpe,
            seed=bpe_seed,
        )
    transcript.append(
        {
            "step": "phase-estimation",
            "theta_B_hat": theta_B,
            "theta_D_hat": theta_D,
            "epsilon_B": config.bpe.epsilon_B,
            "alpha": diagnostics["alpha"],
            "T": diagnostics["T"],
            "m": diagnostics["m"],
            "R": diagnostics["R"],
        }
    )
    inside = decide_interval(theta_B, a, b, delta, config.bpe.epsilon_B)
    if inside == 1:
        decision, p = "accept-1", 1.0
        coin = None
        accept = True
    else:
        decision, p = "accept-prob-bounded", 1.0 / 3.0
        coin = float(coin_rng.random())
        accept = coin < p
    transcript.append(
        {
            "step": "decision",
            "branch": "interval-test",
            "interval": [a, b, delta],
            "in_yes_interval": inside,
            "decision": decision,
            "accept_probability": p,
            "coin": coin,
            "accept": accept,
        }
    )
    return VerifierOutcome(
        energy_estimate=estimate,
        energy_pass=True,
        theta_estimate=theta_B,
        decision=decision,
        transcript=transcript,
        accept=accept,
        accept_probability=p,
    )
