"""Randomized smooth-reduction GCD engine.

The driver strips shared small primes, then repeats reduction rounds:
draw many random multipliers a, compute a*u mod v, strip prime factors
<= B from each residue, and keep the smallest survivor s as the next v.
Each round is expected to shed a chunk of bits because residues with a
large smooth divisor are common enough among T independent draws.

The procedure is Las Vegas: random multipliers can only inflate the
candidate by spurious factors, never lose true ones, so a final
divisibility check against the stripped inputs either certifies the
answer or reports failure.  A wrong answer is never returned.

Trials are deterministic functions of (seed, round, trial index), so
splitting a round across worker processes cannot change the result.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .primes import (
    FactorVector,
    PrimeTable,
    common_small_part,
    factor_vector_product,
    make_table,
)
from . import rng

STATUS_OK = "ok"
STATUS_FAILURE = "failure"
REASON_ROUNDS_EXCEEDED = "rounds_exceeded"
REASON_VERIFICATION_FAILED = "verification_failed"

# Optional test seam: given (round_i, trial_j, u, v) return a forced
# multiplier in [1, v-1], or None to draw randomly.
MultiplierHook = Callable[[int, int, int, int], Optional[int]]

_MASK40 = (1 << 40) - 1


@dataclass(frozen=True)
class GcdConfig:
    """Run parameters for the randomized reduction.

    Defaults follow the n-squared small-prime-bound policy with
    T = ceil(2 * B * log2(n)) trials per round, where n is the total bit
    length of both inputs.  Those are expensive to simulate sequentially
    for large n, so B and T can be pinned independently for desk-scale
    experiments; correctness does not depend on them.
    """

    bound_B: int
    trials_per_round: int
    rounds_cap: int
    seed: int
    c_W: float = 0.5
    workers: int = 1

    def __post_init__(self):
        if self.bound_B < 2:
            raise ValueError("bound_B must be >= 2")
        if self.trials_per_round < 1:
            raise ValueError("trials_per_round must be >= 1")
        if self.rounds_cap < 1:
            raise ValueError("rounds_cap must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @staticmethod
    def defaults_for(
        u: int,
        v: int,
        seed: int,
        bound_B: int | None = None,
        trials_per_round: int | None = None,
        rounds_cap: int | None = None,
        c_W: float = 0.5,
        workers: int = 1,
    ) -> "GcdConfig":
        """Config for a concrete input pair, any field overridable."""
        n = max(u.bit_length() + v.bit_length(), 2)
        B = bound_B if bound_B is not None else n * n
        T = (
            trials_per_round
            if trials_per_round is not None
            else max(1, math.ceil(2 * B * math.log2(n)))
        )
        if rounds_cap is None:
            log2B = math.log2(B)
            loglogB = math.log2(log2B) if log2B > 1 else 0.0
            rounds_cap = math.ceil(4 * n * loglogB / log2B**2) + 16
        return GcdConfig(
            bound_B=B,
            trials_per_round=T,
            rounds_cap=rounds_cap,
            seed=seed,
            c_W=c_W,
            workers=workers,
        )


@dataclass(frozen=True)
class RoundTrial:
    """One multiplier draw: r = a*u mod v, s = r with small primes removed."""

    j: int
    a: int
    r: int
    s: int


@dataclass(frozen=True)
class RoundRecord:
    """Outcome of one reduction round (the minimum over its trials)."""

    i: int
    u_i: int
    v_i: int
    chosen_j: int
    a_chosen: int
    s_i: int
    bits_removed: int


@dataclass(frozen=True)
class GcdResult:
    """Las Vegas outcome: a verified gcd, or an explicit failure."""

    status: str
    gcd: int | None
    rounds: list[RoundRecord]
    g_small: FactorVector
    failure_reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


def euclid_gcd(u: int, v: int) -> int:
    """Classical Euclidean gcd; the reference oracle for everything here."""
    if u == 0 and v == 0:
        raise ValueError("gcd(0, 0) is undefined")
    while v:
        u, v = v, u % v
    return u


def round_trial(u: int, v: int, a: int, table: PrimeTable) -> RoundTrial:
    """Execute a single trial with an explicit multiplier.

    Requires v >= 2 and 1 <= a <= v-1.  The residue keeps index j=0;
    callers that care about trial indices use run_round.
    """
    if v < 2:
        raise ValueError("round_trial needs v >= 2")
    if not 1 <= a <= v - 1:
        raise ValueError("multiplier must lie in [1, v-1]")
    r = a * u % v
    return RoundTrial(j=0, a=a, r=r, s=_rough(r, table))


def _rough(r: int, table: PrimeTable) -> int:
    if r == 0:
        return 0
    g = math.gcd(r, table.product)
    if g == 1:
        return r
    while True:
        h = math.gcd(r, g * g)
        if h == g:
            break
        g = h
    return r // g


def _scan_trials(
    u: int,
    v: int,
    seed: int,
    round_i: int,
    j_lo: int,
    j_hi: int,
    table: PrimeTable,
    hook: MultiplierHook | None = None,
) -> tuple[int, int, int]:
    """Minimum (s, j, a) over trials j in [j_lo, j_hi); ties to smallest j.

    The inner loop inlines the multiplier draw (same counter stream as
    rng.uniform_int) and the smooth strip, since this is where nearly all
    of a run's time goes.
    """
    prod = table.product
    gcd = math.gcd
    blake2b = hashlib.blake2b
    from_bytes = int.from_bytes
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    span = v - 2
    k = span.bit_length()
    slow_draw = k > 512  # multi-block draws fall back to the generic path
    nbytes = (k + 7) // 8 if k else 1
    shift = 8 * nbytes - k
    base_i = (round_i & _MASK40) << 80

    best_s = best_j = best_a = -1
    for j in range(j_lo, j_hi):
        a = hook(round_i, j, u, v) if hook is not None else None
        if a is None:
            if span == 0:
                a = 1
            elif slow_draw:
                a = rng.uniform_int(seed, rng.DOMAIN_TRIAL, round_i, j, 1, v - 1)
            else:
                jb = base_i | ((j & _MASK40) << 40)
                attempt = 0
                while True:
                    d = blake2b(
                        (jb | attempt).to_bytes(16, "little"),
                        key=key,
                        digest_size=nbytes,
                    ).digest()
                    x = from_bytes(d, "little") >> shift
                    if x <= span:
                        break
                    attempt += 1
                a = 1 + x
        r = a * u % v
        if r:
            g = gcd(r, prod)
            if g == 1:
                s = r
            else:
                while True:
                    h = gcd(r, g * g)
                    if h == g:
                        break
                    g = h
                s = r // g
        else:
            s = 0
        if best_s < 0 or s < best_s:
            best_s, best_j, best_a = s, j, a
            if s == 0:
                break  # nothing beats 0 and later j cannot win the tie
    return best_s, best_j, best_a


_worker_tables: dict[tuple[int, int], PrimeTable] = {}


def _scan_task(args) -> tuple[int, int, int]:
    B, n, u, v, seed, round_i, j_lo, j_hi = args
    table = _worker_tables.get((B, n))
    if table is None:
        table = make_table(B, n)
        _worker_tables[(B, n)] = table
    return _scan_trials(u, v, seed, round_i, j_lo, j_hi, table)


def run_round(
    u: int,
    v: int,
    cfg: GcdConfig,
    table: PrimeTable,
    round_i: int,
    hook: MultiplierHook | None = None,
    executor: ProcessPoolExecutor | None = None,
) -> RoundRecord:
    """Run one round of cfg.trials_per_round trials and pick the minimum.

    Requires u >= v >= 2.  The outcome is a pure function of
    (u, v, cfg.seed, round_i) regardless of executor fan-out.
    """
    if v < 2:
        raise ValueError("run_round needs v >= 2")
    T = cfg.trials_per_round
    if executor is not None and hook is None and cfg.workers > 1 and T >= cfg.workers:
        n = table.bit_budget or (u.bit_length() + v.bit_length())
        step = -(-T // cfg.workers)
        tasks = [
            (cfg.bound_B, n, u, v, cfg.seed, round_i, lo, min(lo + step, T + 1))
            for lo in range(1, T + 1, step)
        ]
        best_s, best_j, best_a = min(
            executor.map(_scan_task, tasks), key=lambda t: (t[0], t[1])
        )
    else:
        best_s, best_j, best_a = _scan_trials(
            u, v, cfg.seed, round_i, 1, T + 1, table, hook
        )
    return RoundRecord(
        i=round_i,
        u_i=u,
        v_i=v,
        chosen_j=best_j,
        a_chosen=best_a,
        s_i=best_s,
        bits_removed=v.bit_length() - best_s.bit_length(),
    )


def smooth_gcd(
    u: int,
    v: int,
    cfg: GcdConfig | None = None,
    *,
    seed: int = 0,
    table: PrimeTable | None = None,
    multiplier_hook: MultiplierHook | None = None,
) -> GcdResult:
    """Compute gcd(u, v) by randomized smooth reduction.

    Parameters
    ----------
    u, v : int
        Nonnegative inputs, not both zero.
    cfg : GcdConfig, optional
        Run parameters; defaults to the n-squared policy with `seed`.
    table : PrimeTable, optional
        Prebuilt table (bound must match cfg); built on demand otherwise.
    multiplier_hook : callable, optional
        Test seam overriding individual multiplier draws; forces the
        single-worker path.

    Returns
    -------
    GcdResult
        status "ok" with the exact gcd and per-round trace, or status
        "failure" with reason "rounds_exceeded" / "verification_failed".
        An "ok" result always equals the true gcd: the candidate divides
        both stripped inputs (checked) and is a multiple of their gcd
        (rounds only ever add factors), which forces equality.
    """
    if u < 0 or v < 0:
        raise ValueError("inputs must be nonnegative")
    if u == 0 and v == 0:
        raise ValueError("gcd(0, 0) is undefined")
    if u == 0 or v == 0:
        return GcdResult(STATUS_OK, gcd=u + v, rounds=[], g_small=[])

    if cfg is None:
        cfg = GcdConfig.defaults_for(u, v, seed=seed)
    n_budget = max(u.bit_length() + v.bit_length(), 1)
    if table is None:
        table = make_table(cfg.bound_B, n_budget)
    elif table.bound_B != cfg.bound_B:
        raise ValueError("table bound does not match config")

    g_small, u0, v0 = common_small_part(u, v, table)
    ui, vi = (u0, v0) if u0 >= v0 else (v0, u0)

    rounds: list[RoundRecord] = []
    executor = None
    try:
        if cfg.workers > 1 and multiplier_hook is None:
            executor = ProcessPoolExecutor(max_workers=cfg.workers)
        while ui * vi != 0:
            if len(rounds) >= cfg.rounds_cap:
                return GcdResult(
                    STATUS_FAILURE,
                    gcd=None,
                    rounds=rounds,
                    g_small=g_small,
                    failure_reason=REASON_ROUNDS_EXCEEDED,
                )
            if vi == 1:
                # a*u mod 1 = 0 for every a, so the round's outcome is
                # forced; skip the trials instead of drawing from an
                # empty range.
                ui, vi = 1, 0
                continue
            rec = run_round(
                ui, vi, cfg, table, len(rounds), multiplier_hook, executor
            )
            rounds.append(rec)
            ui, vi = vi, rec.s_i
    finally:
        if executor is not None:
            executor.shutdown()

    candidate = ui + vi
    if u0 % candidate or v0 % candidate:
        return GcdResult(
            STATUS_FAILURE,
            gcd=None,
            rounds=rounds,
            g_small=g_small,
            failure_reason=REASON_VERIFICATION_FAILED,
        )
    return GcdResult(
        STATUS_OK,
        gcd=candidate * factor_vector_product(g_small),
        rounds=rounds,
        g_small=g_small,
    )
