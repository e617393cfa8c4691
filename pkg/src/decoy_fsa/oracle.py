"""Pulse-level Monte Carlo simulator of the Alice -> eavesdropper -> Bob chain.

This is the brute-force cross-check for every closed-form probability in the
package.  Each pulse is simulated mechanistically: a Poisson photon number at
the source, the eavesdropper's photon-number gate (exact count for the ideal
strategy, a binomially thinned count for the PNRD strategy), and a faked-state
resend whose detection at Bob draws the receiver's four equally likely
(result, basis) cases explicitly.  Double clicks resolve to a random bit and so
contribute half weight to the error tallies; pulses the eavesdropper blocks
reach Bob as a bare dark-count opportunity with probability d per gate, the
same bookkeeping the closed forms use.

Runs are deterministic: work is cut into fixed-size shards whose RNG streams
are spawned from the master seed by shard index, and tallies merge in shard
order no matter how shards are executed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import exp
from typing import Mapping

import numpy as np

from .model import SystemParams, channel_transmittance, efficiency_matrix
from .observables import AttackStrategy, Baseline, PNRD, QND, strategy_label

DEFAULT_SHARD_SIZE = 1_000_000

_STREAMS = ("signal", "decoy")
_TALLY_KEYS = ("click0", "click1", "double_click", "loss", "sifted", "sifted_error")


@dataclass
class _Counts:
    """Raw integer tallies accumulated over shards."""

    per_stream: dict[str, dict[str, int]] = field(
        default_factory=lambda: {s: {k: 0 for k in _TALLY_KEYS} for s in _STREAMS}
    )
    clicks: dict[str, int] = field(default_factory=lambda: {s: 0 for s in _STREAMS})
    errors: dict[str, int] = field(default_factory=lambda: {s: 0 for s in _STREAMS})
    n_resend: int = 0
    resend_click0: int = 0
    resend_click1: int = 0
    resend_any: int = 0
    resend_error: int = 0
    n_match_v0: int = 0
    light1_match_v0: int = 0
    n_match_v1: int = 0
    light0_match_v1: int = 0


@dataclass(frozen=True)
class EmpiricalObservables:
    """Estimates and binomial standard errors from one simulation run."""

    params: SystemParams
    strategy: AttackStrategy
    n_pulses: int
    seed: int
    q_mu: float
    q_mu_se: float
    q_nu: float
    q_nu_se: float
    emu_qmu: float
    emu_qmu_se: float
    enu_qnu: float
    enu_qnu_se: float
    p_click0: float
    p_click0_se: float
    p_click1: float
    p_click1_se: float
    p_arrive: float
    p_arrive_se: float
    p_error: float
    p_error_se: float
    r1: float
    r1_se: float
    s0: float
    s0_se: float
    n_resend: int
    n_match_v0: int
    n_match_v1: int
    tallies: Mapping[str, Mapping[str, int]]

    def to_manifest(self) -> dict:
        """Structured record of the run for regression archiving."""
        return {
            "strategy": strategy_label(self.strategy),
            "strategy_fields": {
                k: v for k, v in vars(self.strategy).items()
            },
            "params": {k: v for k, v in vars(self.params).items()},
            "n_pulses": self.n_pulses,
            "seed": self.seed,
            "estimates": {
                name: getattr(self, name)
                for name in (
                    "q_mu", "q_mu_se", "q_nu", "q_nu_se",
                    "emu_qmu", "emu_qmu_se", "enu_qnu", "enu_qnu_se",
                    "p_click0", "p_click0_se", "p_click1", "p_click1_se",
                    "p_arrive", "p_arrive_se", "p_error", "p_error_se",
                    "r1", "r1_se", "s0", "s0_se",
                )
            },
            "n_resend": self.n_resend,
            "n_match_v0": self.n_match_v0,
            "n_match_v1": self.n_match_v1,
            "tallies": {s: dict(t) for s, t in self.tallies.items()},
        }

    def manifest_json(self) -> str:
        return json.dumps(self.to_manifest(), indent=2, sort_keys=True)


def _binom_se(successes: int, trials: int) -> float:
    if trials == 0:
        return math.nan
    p = successes / trials
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def _ratio(successes: int, trials: int) -> float:
    return successes / trials if trials else math.nan


def _resend_click_tables(strategy: QND | PNRD, params: SystemParams):
    """Light-click probability per detector for each (bob_matches, result) case.

    Case index is 2*bob_matches + result; a basis-matched faked state puts all
    its amplitude on the opposite-bit detector, a mismatched one splits in half.
    """
    eff = efficiency_matrix(params, strategy.k)
    mu0 = mu1 = strategy.mu_prime
    p_det0 = np.array([
        1.0 - exp(-0.5 * mu0 * eff.eta_00),   # mismatch, result 0
        1.0 - exp(-0.5 * mu1 * eff.eta_01),   # mismatch, result 1
        0.0,                                  # match, result 0: bit-1 state
        1.0 - exp(-mu1 * eff.eta_01),         # match, result 1: full arm
    ])
    p_det1 = np.array([
        1.0 - exp(-0.5 * mu0 * eff.eta_10),
        1.0 - exp(-0.5 * mu1 * eff.eta_11),
        1.0 - exp(-mu0 * eff.eta_10),
        0.0,
    ])
    return p_det0, p_det1


def _simulate_attack_shard(
    rng: np.random.Generator,
    params: SystemParams,
    strategy: QND | PNRD,
    stream: str,
    m: int,
    counts: _Counts,
    p_det0: np.ndarray,
    p_det1: np.ndarray,
) -> None:
    intensity = params.mu if stream == "signal" else params.nu
    d = params.dark_count

    photons = rng.poisson(intensity, size=m)
    if isinstance(strategy, QND):
        attacked = photons == 1
    else:
        measured = rng.binomial(photons, strategy.eta_e)
        attacked = measured == 1
    ka = int(attacked.sum())
    kb = m - ka

    # Blocked pulses: a single dark-count opportunity, random bit on click.
    blocked_click = rng.random(kb) < d
    blocked_bits = rng.integers(0, 2, size=kb)
    blocked_alice = rng.integers(0, 2, size=kb)
    blocked_err = blocked_click & (blocked_bits != blocked_alice)
    n_block_click = int(blocked_click.sum())
    n_block_err = int(blocked_err.sum())
    block_det1 = int((blocked_bits[blocked_click] == 1).sum())

    # Resent pulses: draw the receiver case, light clicks, and dark counts.
    result = rng.integers(0, 2, size=ka)
    matches = rng.integers(0, 2, size=ka).astype(bool)
    case = 2 * matches.astype(np.int64) + result
    light0 = rng.random(ka) < p_det0[case]
    light1 = rng.random(ka) < p_det1[case]
    dark0 = rng.random(ka) < d
    dark1 = rng.random(ka) < d
    click0 = light0 | dark0
    click1 = light1 | dark1
    clicked = click0 | click1
    double = click0 & click1
    bits = np.where(click1, 1, 0)
    bits[click0 & ~click1] = 0
    coin = rng.integers(0, 2, size=ka)
    bits = np.where(double, coin, bits)
    # Bob-mismatch means the eavesdropper read Alice's basis, so her result is
    # Alice's bit; on Bob-match her basis differed and Alice's bit is fresh.
    alice = np.where(matches, rng.integers(0, 2, size=ka), result)
    errors = clicked & (bits != alice)

    tally = counts.per_stream[stream]
    tally["click0"] += int(click0.sum()) + (n_block_click - block_det1)
    tally["click1"] += int(click1.sum()) + block_det1
    tally["double_click"] += int(double.sum())
    tally["loss"] += int((~clicked).sum()) + (kb - n_block_click)
    tally["sifted"] += int(clicked.sum()) + n_block_click
    tally["sifted_error"] += int(errors.sum()) + n_block_err
    counts.clicks[stream] += int(clicked.sum()) + n_block_click
    counts.errors[stream] += int(errors.sum()) + n_block_err

    counts.n_resend += ka
    counts.resend_click0 += int(click0.sum())
    counts.resend_click1 += int(click1.sum())
    counts.resend_any += int(clicked.sum())
    counts.resend_error += int(errors.sum())

    match_v0 = matches & (result == 0)
    match_v1 = matches & (result == 1)
    counts.n_match_v0 += int(match_v0.sum())
    counts.light1_match_v0 += int((light1 & match_v0).sum())
    counts.n_match_v1 += int(match_v1.sum())
    counts.light0_match_v1 += int((light0 & match_v1).sum())


def _simulate_baseline_shard(
    rng: np.random.Generator,
    params: SystemParams,
    stream: str,
    m: int,
    counts: _Counts,
) -> None:
    intensity = params.mu if stream == "signal" else params.nu
    eta = channel_transmittance(params.alpha, params.distance) * params.eta_bob
    d = params.dark_count

    photons = rng.poisson(intensity, size=m)
    light = rng.binomial(photons, eta) > 0
    dark = rng.random(m) < d
    clicked = light | dark
    flip = rng.random(m) < params.e_detector
    coin = rng.random(m) < 0.5
    errors = clicked & np.where(light, flip, coin)
    det1 = rng.integers(0, 2, size=m) == 1  # unbiased bit stream on a calibrated link

    tally = counts.per_stream[stream]
    tally["click0"] += int((clicked & ~det1).sum())
    tally["click1"] += int((clicked & det1).sum())
    tally["loss"] += int((~clicked).sum())
    tally["sifted"] += int(clicked.sum())
    tally["sifted_error"] += int(errors.sum())
    counts.clicks[stream] += int(clicked.sum())
    counts.errors[stream] += int(errors.sum())


def simulate_pulses(
    params: SystemParams,
    strategy: AttackStrategy,
    n_pulses: int,
    seed: int,
    shard_size: int = DEFAULT_SHARD_SIZE,
) -> EmpiricalObservables:
    """Simulate ``n_pulses`` signal pulses and ``n_pulses`` decoy pulses.

    The shard layout depends only on ``n_pulses`` and ``shard_size``, and each
    shard's RNG stream is spawned from ``seed`` by index, so identical inputs
    give identical tallies regardless of how the shards are scheduled.
    """
    if n_pulses < 1:
        raise ValueError(f"n_pulses must be >= 1, got {n_pulses}")
    if shard_size < 1:
        raise ValueError(f"shard_size must be >= 1, got {shard_size}")

    counts = _Counts()
    n_shards = (n_pulses + shard_size - 1) // shard_size
    children = np.random.SeedSequence(seed).spawn(n_shards)
    attack = not isinstance(strategy, Baseline)
    if attack:
        p_det0, p_det1 = _resend_click_tables(strategy, params)
    for index in range(n_shards):
        rng = np.random.default_rng(children[index])
        m = min(shard_size, n_pulses - index * shard_size)
        for stream in _STREAMS:
            if attack:
                _simulate_attack_shard(
                    rng, params, strategy, stream, m, counts, p_det0, p_det1
                )
            else:
                _simulate_baseline_shard(rng, params, stream, m, counts)

    n = n_pulses
    return EmpiricalObservables(
        params=params,
        strategy=strategy,
        n_pulses=n,
        seed=seed,
        q_mu=_ratio(counts.clicks["signal"], n),
        q_mu_se=_binom_se(counts.clicks["signal"], n),
        q_nu=_ratio(counts.clicks["decoy"], n),
        q_nu_se=_binom_se(counts.clicks["decoy"], n),
        emu_qmu=_ratio(counts.errors["signal"], n),
        emu_qmu_se=_binom_se(counts.errors["signal"], n),
        enu_qnu=_ratio(counts.errors["decoy"], n),
        enu_qnu_se=_binom_se(counts.errors["decoy"], n),
        p_click0=_ratio(counts.resend_click0, counts.n_resend),
        p_click0_se=_binom_se(counts.resend_click0, counts.n_resend),
        p_click1=_ratio(counts.resend_click1, counts.n_resend),
        p_click1_se=_binom_se(counts.resend_click1, counts.n_resend),
        p_arrive=_ratio(counts.resend_any, counts.n_resend),
        p_arrive_se=_binom_se(counts.resend_any, counts.n_resend),
        p_error=_ratio(counts.resend_error, counts.n_resend),
        p_error_se=_binom_se(counts.resend_error, counts.n_resend),
        r1=_ratio(counts.light1_match_v0, counts.n_match_v0),
        r1_se=_binom_se(counts.light1_match_v0, counts.n_match_v0),
        s0=_ratio(counts.light0_match_v1, counts.n_match_v1),
        s0_se=_binom_se(counts.light0_match_v1, counts.n_match_v1),
        n_resend=counts.n_resend,
        n_match_v0=counts.n_match_v0,
        n_match_v1=counts.n_match_v1,
        tallies=counts.per_stream,
    )
