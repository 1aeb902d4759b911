"""Batch attack trials: log in with random passwords, on real or cloned cards.

Each scenario draws seeded random passwords, submits a login per trial, and
aggregates an exact acceptance rate. Against the scheme as specified the rate
is 1.0 — the server check holds for every password — which is precisely the
vulnerability this harness exists to demonstrate.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from authlab.clock import Clock
from authlab.protocol import (
    DEFAULT_WINDOW_SECS,
    AuthDecision,
    Password,
    Reason,
    ServerSecrets,
    SmartcardState,
    authenticate,
    make_login_request,
)

# password generator bounds: any byte value, length 0..64 inclusive
MAX_PASSWORD_LEN = 64

# submit(card, typed_pw, t) -> decision; the default builds a request at t and
# authenticates in-process, alternatives may go over the network
Submit = Callable[[SmartcardState, Password, int], AuthDecision]


class Scenario(Enum):
    RANDOM_PASSWORD = "RANDOM_PASSWORD"
    CLONED_CARD = "CLONED_CARD"


@dataclass(frozen=True)
class AttackTrial:
    """One login attempt: the password actually used, verbatim, and the outcome."""

    trial_index: int
    password_used: Password
    timestamp: int
    accepted: bool
    reason: Reason


@dataclass(frozen=True)
class AttackReport:
    """Aggregate of one attack run, reproducible from (seed, clock)."""

    scenario: Scenario
    trials: int
    accepted: int
    acceptance_rate: float
    seed: int
    trial_log: tuple[AttackTrial, ...] = field(repr=False)

    def to_json(self) -> str:
        """Single-line JSON with exactly the report's aggregate keys."""
        return json.dumps(
            {
                "scenario": self.scenario.value,
                "trials": self.trials,
                "accepted": self.accepted,
                "acceptance_rate": self.acceptance_rate,
                "seed": self.seed,
            }
        )


def clone_card(card: SmartcardState) -> SmartcardState:
    """Duplicate of a (briefly stolen) card; the original is untouched."""
    return replace(card)


def draw_password(rng: random.Random) -> Password:
    """Uniform random length 0..64, arbitrary byte values."""
    return rng.randbytes(rng.randint(0, MAX_PASSWORD_LEN))


def run_random_password_attack(
    card: SmartcardState,
    secrets: ServerSecrets,
    trials: int,
    seed: int,
    clock: Clock,
    *,
    window_secs: int = DEFAULT_WINDOW_SECS,
    submit: Submit | None = None,
    scenario: Scenario = Scenario.RANDOM_PASSWORD,
) -> AttackReport:
    """Attempt `trials` logins with fresh random passwords instead of the real one.

    Deterministic given (seed, clock): passwords come from a seeded PRNG and
    every timestamp from the injected clock. `submit` defaults to building the
    request and authenticating in-process with a fresh receipt time.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    if submit is None:
        def submit(c: SmartcardState, pw: Password, t: int) -> AuthDecision:
            req = make_login_request(c, pw, t)
            return authenticate(secrets, req, t_star=clock(), window_secs=window_secs)

    rng = random.Random(seed)
    log = []
    accepted = 0
    for index in range(trials):
        pw = draw_password(rng)
        t = clock()
        decision = submit(card, pw, t)
        accepted += decision.accepted
        log.append(
            AttackTrial(
                trial_index=index,
                password_used=pw,
                timestamp=t,
                accepted=decision.accepted,
                reason=decision.reason,
            )
        )
    return AttackReport(
        scenario=scenario,
        trials=trials,
        accepted=accepted,
        acceptance_rate=accepted / trials,
        seed=seed,
        trial_log=tuple(log),
    )


def run_cloned_card_attack(
    victim_card: SmartcardState,
    secrets: ServerSecrets,
    trials: int,
    seed: int,
    clock: Clock,
    *,
    window_secs: int = DEFAULT_WINDOW_SECS,
    submit: Submit | None = None,
) -> AttackReport:
    """Duplicate the victim's card, then log in with random passwords.

    Read-only with respect to the victim: their card state is cloned, never
    modified, and their own honest logins keep working throughout.
    """
    dup = clone_card(victim_card)
    return run_random_password_attack(
        dup,
        secrets,
        trials,
        seed,
        clock,
        window_secs=window_secs,
        submit=submit,
        scenario=Scenario.CLONED_CARD,
    )
