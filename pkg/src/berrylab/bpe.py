"""Two-runtime Berry phase estimation and the phase-doubling baseline.

One loop traversal imprints theta_B - theta_D(T) on the ground state, with
the dynamical part linear in the runtime T.  Running phase estimation at two
runtimes T and alpha*T and subtracting eliminates the geometric part from the
difference, so the dynamical phase can be divided out and removed:

    theta_D_hat = ((m_alpha - m1)_(-pi, pi] / (alpha - 1))_[0, 2pi)
    theta_B_hat = (m1 - theta_D_hat)_[0, 2pi)

With 1/(alpha-1) a positive integer the reconstruction is exact for *any*
dynamical phase (the unwrapping ambiguity cancels mod 2 pi); with the formula
alpha = 1 + pi/(T H_max + 2 eps_B) it is exact whenever |theta_D (alpha-1)|
stays below pi.  Per-measurement phase errors eps_ph propagate to at most
eps_ph (1 + 2/(alpha-1)) = eps_B on theta_B_hat; half of that budget goes to
QPE readout and half to the finite-runtime eigenphase lag (about G/T, see
dynamics.phase_lag_scale), which the runtime floor T >= 4 G / eps_B keeps in
bounds after its milder (alpha+1)/alpha amplification.

Both runtimes share the same Trotter step dt (the alpha-run simply takes
proportionally more steps), so step-discretization phase errors that are
linear in T cancel in the reconstruction exactly like the dynamical phase.

The baseline (phase doubling: estimate on the reversed-then-forward composite
loop, which accumulates 2 theta_B) is included for comparison; its output is
a mod-pi quantity and aliases theta_B - pi for theta_B in [pi, 2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .angles import circle_distance, wrap_2pi, wrap_pm_pi
from .dynamics import (
    AdiabaticSchedule,
    calibrate_runtime,
    loop_infidelity,
    loop_propagator,
    phase_lag_scale,
)
from .errors import CapacityError, ConfigError
from .exact import ground_state, min_gap
from .hamiltonians import HamiltonianFamily, norm_bounds
from .qpe import (
    bits_for_precision,
    distribution_for_loop,
    distribution_from_phases,
    estimate_from_distribution,
)

TWO_PI = 2.0 * math.pi

# Exact per-step propagators are dense eigendecompositions; cap the total
# step count per estimation run so pathological (near-gapless) families fail
# fast with a capacity error instead of grinding.
MAX_TOTAL_STEPS = 2_000_000


# ---------------------------------------------------------------------------
# Wrapped intervals and the decision rule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WrappedInterval:
    """Arc [a, b] on the circle: plain [a, b] if b >= a after wrapping,
    otherwise the union [0, b] cup [a, 2 pi).  Closed at both endpoints."""

    a: float
    b: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", wrap_2pi(self.a))
        object.__setattr__(self, "b", wrap_2pi(self.b))

    def contains(self, theta: float) -> bool:
        t = wrap_2pi(theta)
        if self.b >= self.a:
            return self.a <= t <= self.b
        return t <= self.b or t >= self.a

    def distance(self, theta: float) -> float:
        """Wrapped distance from theta to the arc (0 when inside)."""
        if self.contains(theta):
            return 0.0
        return min(circle_distance(theta, self.a), circle_distance(theta, self.b))

    def shrink(self, delta: float) -> "WrappedInterval":
        return WrappedInterval(self.a + delta, self.b - delta)

    def promise_complement(self, delta: float) -> "WrappedInterval":
        """The opposing promise arc [b + delta, a - delta]."""
        return WrappedInterval(self.b + delta, self.a - delta)


def decide_interval(theta_hat: float, a: float, b: float, delta: float,
                    eps_B: float) -> int:
    """1 iff theta_hat lies within delta - eps_B of the arc [a, b].

    Under the promise (true phase inside the shrunken arc or deep in its
    complement) this reproduces the true interval bit whenever the estimate
    is eps_B-accurate.
    """
    if not eps_B < 2.0 * delta:
        raise ConfigError(
            f"need eps_B < 2*delta for a meaningful decision margin, got "
            f"eps_B={eps_B}, delta={delta}"
        )
    return int(WrappedInterval(a, b).distance(theta_hat) <= delta - eps_B)


# ---------------------------------------------------------------------------
# Runtime-pair selection and reconstruction
# ---------------------------------------------------------------------------


def choose_alpha(T: float, H_max: float, eps_B: float, mode: str = "formula",
                 cap: float | None = None) -> float:
    """Second-runtime ratio alpha.

    formula mode: alpha = 1 + pi/(T H_max + 2 eps_B), which keeps
    |theta_D (alpha-1)| < pi - 2 eps_ph so the difference unwraps uniquely.

    integer mode: alpha = 1 + 1/q with q the smallest positive integer
    keeping (alpha - 1) T H_max below ``cap`` (q = 1, i.e. alpha = 2, when no
    cap is given).  Reconstruction is then exact for arbitrary dynamical
    phase, no unwrap condition needed.
    """
    if T < 0 or H_max < 0:
        raise ConfigError("T and H_max must be non-negative")
    if eps_B <= 0:
        raise ConfigError(f"eps_B must be positive, got {eps_B}")
    if mode == "formula":
        return 1.0 + math.pi / (T * H_max + 2.0 * eps_B)
    if mode in ("integer", "integer-reciprocal"):
        if cap is None or T * H_max == 0.0:
            q = 1
        else:
            if cap <= 0:
                raise ConfigError(f"alpha cap must be positive, got {cap}")
            q = max(1, math.ceil(T * H_max / cap))
        return 1.0 + 1.0 / q
    raise ConfigError(f"unknown alpha mode {mode!r}")


def reconstruct_phases(m1: float, m_alpha: float, alpha: float,
                       mode: str = "formula") -> tuple[float, float]:
    """(theta_D_hat, theta_B_hat) from the two measured loop phases."""
    if alpha <= 1.0:
        raise ConfigError(f"alpha must exceed 1, got {alpha}")
    if mode in ("integer", "integer-reciprocal"):
        q = 1.0 / (alpha - 1.0)
        if abs(q - round(q)) > 1e-9:
            raise ConfigError(
                f"integer mode needs 1/(alpha-1) integral, got {q:.6f}"
            )
    elif mode != "formula":
        raise ConfigError(f"unknown alpha mode {mode!r}")
    diff = wrap_pm_pi(m_alpha - m1)
    theta_D = wrap_2pi(diff / (alpha - 1.0))
    theta_B = wrap_2pi(m1 - theta_D)
    return theta_D, theta_B


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BpeConfig:
    """Knobs for a two-runtime estimation run.

    Unset fields (None) are resolved by the engine: T by a doubling search
    on measured loop infidelity plus the phase-lag floor 4 G / eps_B, alpha
    by choose_alpha, m from half the phase budget
    eps_ph = eps_B (alpha-1)/(alpha+1) (the other half absorbs the residual
    eigenphase lag), R from the failure budget.
    """

    epsilon_B: float = 0.05
    eta: float = 0.05
    alpha_mode: str = "integer"
    alpha: float | None = None
    alpha_cap: float | None = None
    T: float | None = None
    m: int | None = None
    R: int | None = None
    oversampling: float = 10.0
    trotter_order: int = 2
    gap_grid: int = 64
    guiding_floor: float = 0.25

    def __post_init__(self) -> None:
        if self.epsilon_B <= 0:
            raise ConfigError(f"epsilon_B must be positive, got {self.epsilon_B}")
        if not (0.0 < self.eta < 1.0):
            raise ConfigError(f"eta must be in (0, 1), got {self.eta}")
        if self.alpha_mode not in ("integer", "integer-reciprocal", "formula"):
            raise ConfigError(f"unknown alpha mode {self.alpha_mode!r}")
        if self.alpha is not None and self.alpha <= 1.0:
            raise ConfigError(f"alpha must exceed 1, got {self.alpha}")

    @property
    def eta_qpe(self) -> float:
        # Four failure opportunities per run pair (two adiabatic legs, two
        # phase estimations) share the budget evenly.
        return 1.0 - (1.0 - self.eta) ** 0.25

    @property
    def delta_adia(self) -> float:
        return math.sqrt(self.eta_qpe)


def _eps_ph(eps_B: float, alpha: float) -> float:
    return eps_B * (alpha - 1.0) / (alpha + 1.0)


def _default_repetitions(eta_qpe: float) -> int:
    R = max(5, math.ceil(4.0 * math.log(1.0 / eta_qpe)))
    return R if R % 2 == 1 else R + 1


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


class BpeEngine:
    """Precomputed two-runtime estimator for one family.

    Building the engine does all the heavy work (gap scan, runtime
    calibration, the two loop propagators and their exact QPE outcome
    distributions); run(seed) then just samples, so sweeping many seeds on
    one family is cheap.
    """

    def __init__(
        self,
        family: HamiltonianFamily,
        config: BpeConfig | None = None,
        guiding_state=None,
    ) -> None:
        self.family = family
        self.config = config or BpeConfig()
        cfg = self.config

        self.h_max, self.d1_max, self.d2_max = norm_bounds(family)
        self.gap, self.gap_argmin = min_gap(family, cfg.gap_grid)
        self.E0, self.psi0 = ground_state(family, 0.0)

        self.guiding_fidelity = 1.0
        if guiding_state is not None:
            guide = np.asarray(guiding_state, dtype=complex)
            if guide.shape != (family.dim,):
                raise ConfigError(
                    f"guiding state has shape {guide.shape}, expected "
                    f"({family.dim},)"
                )
            self.guiding_fidelity = float(abs(np.vdot(guide, self.psi0)) ** 2)
            if self.guiding_fidelity < cfg.guiding_floor:
                raise ConfigError(
                    f"guiding-state fidelity {self.guiding_fidelity:.3f} below "
                    f"the floor {cfg.guiding_floor}; cannot postselect the "
                    "ground state from this input"
                )

        self.calibration: dict | None = None
        T = cfg.T
        if T is None:
            T, self.calibration = calibrate_runtime(
                family,
                cfg.delta_adia,
                oversampling=cfg.oversampling,
                trotter_order=cfg.trotter_order,
            )

        # The infidelity search certifies state tracking (a 1/T^2 effect)
        # but not the eigenphase, which lags the ideal -E0 T + theta_B by
        # about G/T and is amplified (alpha+1)/alpha < 2 fold by the
        # reconstruction.  Floor the runtime so that systematic stays within
        # half of eps_B; QPE readout gets the other half via m below.
        self.phase_lag = phase_lag_scale(family, cfg.gap_grid)
        self.T_phase_floor = 4.0 * self.phase_lag / cfg.epsilon_B
        if cfg.T is None and T < self.T_phase_floor:
            T = self.T_phase_floor
            self.calibration = dict(self.calibration)
            self.calibration["phase_lag_floor"] = self.T_phase_floor
            self.calibration["infidelity"] = loop_infidelity(
                family,
                T,
                oversampling=cfg.oversampling,
                trotter_order=cfg.trotter_order,
            )
        self.T = float(T)

        if cfg.alpha is not None:
            self.alpha_nominal = float(cfg.alpha)
        else:
            self.alpha_nominal = choose_alpha(
                self.T, self.h_max, cfg.epsilon_B, cfg.alpha_mode, cfg.alpha_cap
            )

        # Shared-step schedules: the alpha run reuses dt exactly, and the
        # realized step ratio is what enters the reconstruction.
        steps = max(1, math.ceil(self.T * max(self.h_max, 1e-12)
                                 * cfg.oversampling))
        if cfg.alpha_mode in ("integer", "integer-reciprocal"):
            q = round(1.0 / (self.alpha_nominal - 1.0))
            if abs(1.0 / (self.alpha_nominal - 1.0) - q) > 1e-9 or q < 1:
                raise ConfigError(
                    f"integer mode needs 1/(alpha-1) integral, got alpha="
                    f"{self.alpha_nominal}"
                )
            steps = q * math.ceil(steps / q)
            steps_alpha = steps + steps // q
        else:
            steps_alpha = max(steps + 1, round(self.alpha_nominal * steps))
        self.steps = steps
        self.steps_alpha = steps_alpha
        self.alpha = steps_alpha / steps  # realized ratio, exact in floats
        self.dt = self.T / steps
        self.T_alpha = self.dt * steps_alpha
        if steps + steps_alpha > MAX_TOTAL_STEPS:
            raise CapacityError(
                f"runtime T={self.T:.3e} needs {steps + steps_alpha} exact "
                f"Trotter steps, over the per-run budget of {MAX_TOTAL_STEPS}; "
                "the family's phase-lag scale or norm is too large for "
                "desk-scale estimation"
            )

        self.eps_ph = _eps_ph(cfg.epsilon_B, self.alpha)
        self.m = (
            cfg.m if cfg.m is not None else bits_for_precision(0.5 * self.eps_ph)
        )
        self.R = cfg.R if cfg.R is not None else _default_repetitions(cfg.eta_qpe)

        sched1 = AdiabaticSchedule(T=self.T, steps=steps,
                                   trotter_order=cfg.trotter_order)
        sched_a = AdiabaticSchedule(T=self.T_alpha, steps=steps_alpha,
                                    trotter_order=cfg.trotter_order)
        self.dist1 = distribution_for_loop(self.family, sched1, self.psi0, self.m)
        self.dist_alpha = distribution_for_loop(
            self.family, sched_a, self.psi0, self.m
        )

    def run(self, seed) -> tuple[float, float, dict]:
        """One seeded estimation: returns (theta_B_hat, theta_D_hat,
        diagnostics)."""
        ss = (
            seed
            if isinstance(seed, np.random.SeedSequence)
            else np.random.SeedSequence(seed)
        )
        child1, child2 = ss.spawn(2)
        est1 = estimate_from_distribution(
            self.dist1, self.R, np.random.default_rng(child1)
        )
        est_a = estimate_from_distribution(
            self.dist_alpha, self.R, np.random.default_rng(child2)
        )
        theta_D, theta_B = reconstruct_phases(
            est1.value, est_a.value, self.alpha, self.config.alpha_mode
        )
        diagnostics = {
            "seed": seed if isinstance(seed, int) else repr(seed),
            "T": self.T,
            "T_alpha": self.T_alpha,
            "alpha_nominal": self.alpha_nominal,
            "alpha": self.alpha,
            "alpha_mode": self.config.alpha_mode,
            "steps": self.steps,
            "steps_alpha": self.steps_alpha,
            "dt": self.dt,
            "m": self.m,
            "R": self.R,
            "eps_ph": self.eps_ph,
            "epsilon_B": self.config.epsilon_B,
            "eta": self.config.eta,
            "eta_qpe": self.config.eta_qpe,
            "delta_adia": self.config.delta_adia,
            "H_max": self.h_max,
            "dH_max": self.d1_max,
            "d2H_max": self.d2_max,
            "gap": self.gap,
            "gap_argmin": self.gap_argmin,
            "phase_lag": self.phase_lag,
            "T_phase_floor": self.T_phase_floor,
            "E0": self.E0,
            "guiding_fidelity": self.guiding_fidelity,
            "calibration": self.calibration,
            "m1": est1.value,
            "m_alpha": est_a.value,
            "raw_outcomes_1": est1.raw_outcomes,
            "raw_outcomes_alpha": est_a.raw_outcomes,
            "low_fidelity_warning": bool(
                est1.low_fidelity_warning or est_a.low_fidelity_warning
            ),
        }
        return theta_B, theta_D, diagnostics


def run_bpe(
    family: HamiltonianFamily,
    initial_ground_state=None,
    config: BpeConfig | None = None,
    seed: int = 0,
) -> tuple[float, float, dict]:
    """Two-runtime Berry phase estimation; see BpeEngine for the heavy
    lifting.

    The initial state acts as a guide: its fidelity against the exact ground
    state of H(0) is checked (and recorded), after which the algorithm runs
    on the postselected ground state — the idealized limit of preparing with
    measurement + retry.
    """
    engine = BpeEngine(family, config, guiding_state=initial_ground_state)
    return engine.run(seed)


# ---------------------------------------------------------------------------
# Phase-doubling baseline
# ---------------------------------------------------------------------------


def murta_bpe(
    family: HamiltonianFamily,
    initial_ground_state=None,
    config: BpeConfig | None = None,
    seed: int = 0,
    return_diagnostics: bool = False,
):
    """Baseline estimator from the reversed-then-forward composite loop.

    The composite accumulates 2 theta_B with no dynamical component, so a
    single phase estimation suffices — but the halved readout lives in
    [0, pi) and aliases theta_B - pi whenever theta_B >= pi.
    """
    cfg = config or BpeConfig()
    h_max, _, _ = norm_bounds(family)
    min_gap(family, cfg.gap_grid)  # degeneracy guard
    _, psi0 = ground_state(family, 0.0)

    if initial_ground_state is not None:
        guide = np.asarray(initial_ground_state, dtype=complex)
        fid = float(abs(np.vdot(guide, psi0)) ** 2)
        if fid < cfg.guiding_floor:
            raise ConfigError(
                f"guiding-state fidelity {fid:.3f} below the floor "
                f"{cfg.guiding_floor}"
            )

    T = cfg.T
    calibration = None
    if T is None:
        T, calibration = calibrate_runtime(
            family, cfg.delta_adia,
            oversampling=cfg.oversampling, trotter_order=cfg.trotter_order,
        )
        # Same phase-lag floor as the two-runtime engine: the composite's
        # readout inherits each leg's ~G/T eigenphase lag.
        T = max(T, 4.0 * phase_lag_scale(family, cfg.gap_grid) / cfg.epsilon_B)
    steps = max(1, math.ceil(T * max(h_max, 1e-12) * cfg.oversampling))
    if 2 * steps > MAX_TOTAL_STEPS:
        raise CapacityError(
            f"runtime T={T:.3e} needs {2 * steps} exact Trotter steps, over "
            f"the per-run budget of {MAX_TOTAL_STEPS}"
        )
    fwd = AdiabaticSchedule(T=T, steps=steps, direction="forward",
                            trotter_order=cfg.trotter_order)
    rev = AdiabaticSchedule(T=T, steps=steps, direction="reversed",
                            trotter_order=cfg.trotter_order)
    composite = loop_propagator(family, rev) @ loop_propagator(family, fwd)

    m = cfg.m if cfg.m is not None else bits_for_precision(cfg.epsilon_B)
    R = cfg.R if cfg.R is not None else _default_repetitions(cfg.eta_qpe)
    Tm, Q = scipy.linalg.schur(composite, output="complex")
    phases = np.angle(np.diag(Tm))
    weights = np.abs(Q.conj().T @ psi0) ** 2
    dist = distribution_from_phases(phases, weights, m)
    est = estimate_from_distribution(dist, R, np.random.default_rng(seed))
    theta = est.value / 2.0  # in [0, pi)

    if not return_diagnostics:
        return theta
    return theta, {
        "seed": seed if isinstance(seed, int) else repr(seed),
        "T": T,
        "steps": steps,
        "m": m,
        "R": R,
        "doubled_phase": est.value,
        "raw_outcomes": est.raw_outcomes,
        "calibration": calibration,
        "low_fidelity_warning": est.low_fidelity_warning,
    }
