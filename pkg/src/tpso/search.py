"""Population-based feature-subset search: continuous PSO with threshold
decoding, and a bit-string GA baseline.

Both maximise an ``evaluator(mask) -> float`` and memoise it per distinct
mask, so ``SearchResult.evaluations`` counts real evaluator calls.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SearchError(RuntimeError):
    pass


@dataclass
class SwarmConfig:
    n_particles: int = 50
    iterations: int = 100
    c1: float = 2.0
    c2: float = 2.0
    w_start: float = 0.9
    w_end: float = 0.4
    v_max: float = 4.0
    decode_threshold: float = 0.5
    seed: int | None = 0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < self.decode_threshold < 1.0:
            raise ValueError("decode_threshold must lie in (0, 1)")
        if self.v_max <= 0:
            raise ValueError("v_max must be positive")

    def inertia(self, t: int) -> float:
        """Inertia at iteration ``t`` (1-based), linear from w_start to w_end."""
        if self.iterations == 1:
            return self.w_start
        frac = (t - 1) / (self.iterations - 1)
        return self.w_start + (self.w_end - self.w_start) * frac


@dataclass
class GAConfig:
    population: int = 50
    generations: int = 100
    crossover_rate: float = 1.0
    mutation_rate: float = 0.001
    tournament: int = 2
    elitism: int = 1
    seed: int | None = 0


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float = -np.inf


@dataclass
class SearchResult:
    best_mask: np.ndarray
    best_fitness: float
    evaluations: int
    history: list = field(default_factory=list)


def init_swarm(d: int, config: SwarmConfig, rng=None) -> list[Particle]:
    if d < 1:
        raise ValueError("need at least one feature dimension")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    swarm = []
    for _ in range(config.n_particles):
        x = rng.random(d)
        v = rng.uniform(-config.v_max, config.v_max, d)
        swarm.append(Particle(x, v, x.copy()))
    return swarm


def update_particle(particle: Particle, gbest_position, config: SwarmConfig, rng, w=None, r1=None, r2=None) -> Particle:
    """One velocity/position step.

    The velocity is updated first from the current position, clamped to
    [-v_max, v_max], then added to the position, which is clamped to [0, 1].
    ``w`` defaults to ``config.w_start``; ``r1``/``r2`` default to fresh
    uniform draws.
    """
    d = len(particle.position)
    w = config.w_start if w is None else w
    r1 = rng.random(d) if r1 is None else r1
    r2 = rng.random(d) if r2 is None else r2
    x = particle.position
    v = (
        w * particle.velocity
        + config.c1 * r1 * (particle.pbest_position - x)
        + config.c2 * r2 * (np.asarray(gbest_position) - x)
    )
    v = np.clip(v, -config.v_max, config.v_max)
    particle.velocity = v
    particle.position = np.clip(x + v, 0.0, 1.0)
    return particle


def decode(position, threshold: float = 0.5) -> np.ndarray:
    position = np.asarray(position)
    mask = position > threshold
    if not mask.any():
        mask[int(np.argmax(position))] = True
    return mask


class _Memo:
    """Evaluator wrapper caching fitness by mask bits."""

    def __init__(self, evaluator, cache=None):
        self.evaluator = evaluator
        self.cache = {} if cache is None else cache
        self.calls = 0

    def __call__(self, mask) -> float:
        key = np.packbits(mask).tobytes() + len(mask).to_bytes(4, "little")
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        value = float(self.evaluator(mask.copy()))
        self.calls += 1
        self.cache[key] = value
        return value


def pso_search(d: int, config: SwarmConfig, evaluator, cache=None, log=None) -> SearchResult:
    """Standard gbest PSO over [0, 1]^d, scoring decoded masks.

    The initial swarm is evaluated, then each of ``config.iterations``
    iterations moves every particle and re-evaluates it.  Personal and global
    bests are merged in particle order after each evaluation sweep; a tie
    never displaces the incumbent.  ``cache`` may be a dict shared across
    runs with the same evaluator.
    """
    rng = np.random.default_rng(config.seed)
    memo = _Memo(evaluator, cache)
    swarm = init_swarm(d, config, rng)
    gbest_pos = None
    gbest_fit = -np.inf
    history = []

    def sweep(t):
        nonlocal gbest_pos, gbest_fit
        for idx, p in enumerate(swarm):
            mask = decode(p.position, config.decode_threshold)
            try:
                fit = memo(mask)
            except Exception as exc:
                raise SearchError(f"evaluator failed at iteration {t}, particle {idx}: {exc}") from exc
            if fit > p.pbest_fitness:
                p.pbest_fitness = fit
                p.pbest_position = p.position.copy()
        for p in swarm:
            if p.pbest_fitness > gbest_fit:
                gbest_fit = p.pbest_fitness
                gbest_pos = p.pbest_position.copy()
        history.append(gbest_fit)

    sweep(0)
    for t in range(1, config.iterations + 1):
        w = config.inertia(t)
        for p in swarm:
            update_particle(p, gbest_pos, config, rng, w=w)
        sweep(t)
        if log is not None:
            log(t, gbest_fit)
    return SearchResult(decode(gbest_pos, config.decode_threshold), float(gbest_fit), memo.calls, history)


def _repair(chrom, rng):
    if not chrom.any():
        chrom[rng.integers(len(chrom))] = True
    return chrom


def ga_search(d: int, config: GAConfig, evaluator, cache=None, population=None) -> SearchResult:
    """Generational GA on bit strings.

    Binary tournament selection, single-point crossover, per-bit mutation and
    elitism.  All-zero chromosomes are repaired by switching one random bit
    on.  ``population`` optionally seeds the initial chromosomes.
    """
    if d < 1:
        raise ValueError("need at least one feature dimension")
    rng = np.random.default_rng(config.seed)
    memo = _Memo(evaluator, cache)
    if population is None:
        pop = rng.random((config.population, d)) < 0.5
    else:
        pop = np.array(population, dtype=bool).copy()
    for chrom in pop:
        _repair(chrom, rng)
    size = len(pop)

    def evaluate(population):
        try:
            return np.array([memo(c) for c in population])
        except Exception as exc:
            raise SearchError(f"evaluator failed: {exc}") from exc

    fit = evaluate(pop)
    best = int(np.argmax(fit))
    best_mask, best_fit = pop[best].copy(), float(fit[best])
    history = [best_fit]
    for _ in range(config.generations):
        elite_idx = np.argsort(-fit, kind="stable")[: config.elitism]
        children = [pop[i].copy() for i in elite_idx]
        while len(children) < size:
            parents = []
            for _ in range(2):
                contenders = rng.integers(size, size=config.tournament)
                parents.append(pop[contenders[np.argmax(fit[contenders])]])
            a, b = parents[0].copy(), parents[1].copy()
            if d > 1 and rng.random() < config.crossover_rate:
                cut = rng.integers(1, d)
                a[cut:], b[cut:] = parents[1][cut:], parents[0][cut:]
            for child in (a, b):
                flips = rng.random(d) < config.mutation_rate
                child ^= flips
                _repair(child, rng)
                if len(children) < size:
                    children.append(child)
        pop = np.array(children)
        fit = evaluate(pop)
        gen_best = int(np.argmax(fit))
        if fit[gen_best] > best_fit:
            best_mask, best_fit = pop[gen_best].copy(), float(fit[gen_best])
        history.append(best_fit)
    return SearchResult(best_mask, best_fit, memo.calls, history)
