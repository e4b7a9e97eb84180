"""Real-coded NSGA-II with a spread-based stopping rule.

Objectives are minimised. The evaluator is called as ``evaluator(genome,
seed)`` and returns a tuple of objective values; seeds are derived from
(master seed, generation, index), so a run is reproducible regardless of how
evaluations are scheduled across threads.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)

# kappa_C, kappa_S in [n^-2, n^2] with n = 3; kappa_H in [0, 1]
SFRF_BOUNDS = ((1.0 / 9.0, 9.0), (1.0 / 9.0, 9.0), (0.0, 1.0))


class EvolutionError(RuntimeError):
    """Evaluator failure; ``archive`` holds the last complete non-dominated set."""

    def __init__(self, message, archive=None, history=None):
        super().__init__(message)
        self.archive = archive
        self.history = history


@dataclass
class Individual:
    genome: np.ndarray
    objectives: Optional[tuple] = None
    rank: int = 0
    crowding: float = 0.0
    eval_seed: Optional[int] = None
    generation: int = 0


@dataclass
class ParetoArchive:
    individuals: list
    generation_found: int = 0

    def __len__(self):
        return len(self.individuals)

    def __iter__(self):
        return iter(self.individuals)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    max_generations: int = 300
    spread_tolerance: float = 1e-4
    stall_generations: int = 25
    crossover_probability: float = 0.9
    crossover_eta: float = 20.0
    mutation_eta: float = 20.0
    mutation_rate: Optional[float] = None  # per gene; None -> 1 / n_genes
    seed: int = 0
    threads: int = 1
    check_archive: bool = False

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError(f"population_size must be even and >= 4, got {self.population_size}")
        if self.max_generations < 0:
            raise ValueError("max_generations must be >= 0")
        if self.stall_generations < 1:
            raise ValueError("stall_generations must be >= 1")


def dominates(a, b) -> bool:
    if len(a) != len(b):
        raise ValueError("objective vectors differ in length")
    strictly = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly


def _objective_matrix(population) -> np.ndarray:
    objs = []
    for ind in population:
        if ind.objectives is None:
            raise ValueError("population contains an unevaluated individual")
        objs.append(ind.objectives)
    return np.asarray(objs, dtype=float)


def fast_nondominated_sort(population) -> list[list[int]]:
    """Fronts as lists of population indices; front 0 is non-dominated."""
    F = _objective_matrix(population)
    n = F.shape[0]
    if n == 0:
        return []
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    counts = dom.sum(axis=0)
    fronts = []
    current = [i for i in range(n) if counts[i] == 0]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in np.flatnonzero(dom[i]):
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(int(j))
        current = sorted(nxt)
    for r, front in enumerate(fronts):
        for i in front:
            population[i].rank = r
    return fronts


def crowding_distance(front) -> np.ndarray:
    """Crowding distance of each member; also stored on the individuals."""
    F = _objective_matrix(front)
    n, m = F.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
    else:
        for k in range(m):
            order = np.argsort(F[:, k], kind="stable")
            lo, hi = F[order[0], k], F[order[-1], k]
            dist[order[0]] = dist[order[-1]] = np.inf
            span = hi - lo
            if span == 0:
                continue
            gaps = (F[order[2:], k] - F[order[:-2], k]) / span
            dist[order[1:-1]] += gaps
    for ind, d in zip(front, dist):
        ind.crowding = float(d)
    return dist


def _nearest_neighbour_distances(P: np.ndarray) -> np.ndarray:
    if P.shape[0] < 2:
        return np.zeros(0)
    d = np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def spread(front, previous_front) -> float:
    """Spread of ``front`` relative to ``previous_front``.

    Objectives are scaled by the previous front's per-objective range (1 where
    the range is zero). With d_ext the summed movement of each objective's
    extreme point between the fronts and d_i the nearest-neighbour distances
    inside ``front`` (mean d_bar)::

        spread = (d_ext + sum |d_i - d_bar|) / (d_ext + N * d_bar)

    and 0 when the denominator vanishes. An evenly spaced, unmoved front
    scores 0; movement of the extremes pushes the value toward 1.
    """
    P = front if isinstance(front, np.ndarray) else _objective_matrix(front)
    Q = previous_front if isinstance(previous_front, np.ndarray) else _objective_matrix(previous_front)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if P.size == 0 or Q.size == 0:
        raise ValueError("fronts must be non-empty")
    scale = Q.max(axis=0) - Q.min(axis=0)
    scale[scale == 0] = 1.0
    P, Q = P / scale, Q / scale
    d_ext = sum(
        float(np.linalg.norm(P[np.argmin(P[:, k])] - Q[np.argmin(Q[:, k])])) for k in range(P.shape[1])
    )
    nn = _nearest_neighbour_distances(P)
    d_bar = float(nn.mean()) if nn.size else 0.0
    num = d_ext + float(np.abs(nn - d_bar).sum())
    den = d_ext + nn.size * d_bar
    return num / den if den > 0 else 0.0


def select_best_rul(archive) -> Individual:
    """Member with the lowest first objective (RUL error); ties by smoothness, then monotonicity."""
    members = list(archive)
    if not members:
        raise ValueError("empty archive")
    return min(members, key=lambda ind: (ind.objectives[0], ind.objectives[2], ind.objectives[1]))


def derive_seed(master: int, generation: int, index: int) -> int:
    return int(np.random.SeedSequence([int(master), generation, index]).generate_state(1, np.uint64)[0])


def _sbx(p1, p2, lo, hi, eta, rng):
    c1, c2 = p1.copy(), p2.copy()
    for i in range(p1.size):
        if rng.random() > 0.5 or abs(p1[i] - p2[i]) < 1e-14:
            continue
        u = rng.random()
        if u <= 0.5:
            beta = (2.0 * u) ** (1.0 / (eta + 1.0))
        else:
            beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0))
        c1[i] = 0.5 * ((1 + beta) * p1[i] + (1 - beta) * p2[i])
        c2[i] = 0.5 * ((1 - beta) * p1[i] + (1 + beta) * p2[i])
    return np.clip(c1, lo, hi), np.clip(c2, lo, hi)


def _polynomial_mutation(x, lo, hi, eta, rate, rng):
    y = x.copy()
    for i in range(x.size):
        if rng.random() >= rate:
            continue
        span = hi[i] - lo[i]
        if span <= 0:
            continue
        u = rng.random()
        if u < 0.5:
            delta = (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0
        else:
            delta = 1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0))
        y[i] = x[i] + delta * span
    return np.clip(y, lo, hi)


def _tournament(population, rng) -> Individual:
    a, b = rng.integers(0, len(population), size=2)
    ia, ib = population[a], population[b]
    if ia.rank != ib.rank:
        return ia if ia.rank < ib.rank else ib
    if ia.crowding != ib.crowding:
        return ia if ia.crowding > ib.crowding else ib
    return ia if rng.random() < 0.5 else ib


def _select(pool, size) -> list:
    """Elitist truncation: whole fronts first, then the least crowded of the split front."""
    fronts = fast_nondominated_sort(pool)
    chosen = []
    for front in fronts:
        members = [pool[i] for i in front]
        crowding_distance(members)
        if len(chosen) + len(members) <= size:
            chosen.extend(members)
        else:
            order = sorted(range(len(members)), key=lambda i: -members[i].crowding)
            chosen.extend(members[i] for i in order[: size - len(chosen)])
            break
    # crowding values must reflect the surviving population for the next tournament
    for front in fast_nondominated_sort(chosen):
        crowding_distance([chosen[i] for i in front])
    return chosen


@dataclass
class EvolutionResult:
    archive: ParetoArchive
    history: list = field(default_factory=list)  # one dict per generation
    population: list = field(default_factory=list)
    generations: int = 0
    converged: bool = False


def _archive_of(population, generation) -> ParetoArchive:
    fronts = fast_nondominated_sort(population)
    members = [population[i] for i in fronts[0]]
    crowding_distance(members)
    return ParetoArchive(members, generation)


def _check_archive(archive):
    objs = [ind.objectives for ind in archive]
    for i, a in enumerate(objs):
        for j, b in enumerate(objs):
            if i != j and dominates(a, b):
                raise AssertionError("archive contains a dominated pair")


def evolve(
    evaluator: Callable,
    config: GaConfig = GaConfig(),
    bounds: Sequence[tuple] = SFRF_BOUNDS,
    initial: Optional[Sequence] = None,
    callback: Optional[Callable] = None,
) -> EvolutionResult:
    """Run NSGA-II until ``max_generations`` or until the spread settles.

    ``initial`` optionally seeds the first genomes (the rest are uniform in
    bounds). Convergence: the mean absolute change of the spread over the last
    ``stall_generations`` generations is below ``spread_tolerance``.
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    n_genes = lo.size
    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / n_genes
    rng = np.random.default_rng(np.random.SeedSequence([int(config.seed), 0xA5]))
    N = config.population_size

    genomes = [np.clip(np.asarray(g, dtype=float), lo, hi) for g in (initial or [])][:N]
    while len(genomes) < N:
        genomes.append(lo + rng.random(n_genes) * (hi - lo))

    history: list = []
    archive: Optional[ParetoArchive] = None
    pool = ThreadPoolExecutor(max_workers=config.threads) if config.threads > 1 else None

    def evaluate(inds, generation):
        seeds = [derive_seed(config.seed, generation, i) for i in range(len(inds))]
        try:
            if pool is None:
                results = [evaluator(ind.genome, s) for ind, s in zip(inds, seeds)]
            else:
                results = list(pool.map(lambda a: evaluator(*a), [(ind.genome, s) for ind, s in zip(inds, seeds)]))
        except Exception as exc:
            raise EvolutionError(f"evaluation failed in generation {generation}: {exc}", archive, history) from exc
        for ind, s, obj in zip(inds, seeds, results):
            ind.objectives = tuple(float(v) for v in obj)
            ind.eval_seed = s
            ind.generation = generation

    try:
        population = [Individual(g) for g in genomes]
        evaluate(population, 0)
        population = _select(population, N)
        archive = _archive_of(population, 0)
        prev_front = _objective_matrix(archive.individuals)
        spreads = [0.0]
        history.append(_history_entry(0, archive, 0.0, 0.0))
        if callback:
            callback(0, population, archive)

        converged = False
        gen = 0
        for gen in range(1, config.max_generations + 1):
            offspring = []
            while len(offspring) < N:
                p1, p2 = _tournament(population, rng), _tournament(population, rng)
                if rng.random() < config.crossover_probability:
                    c1, c2 = _sbx(p1.genome, p2.genome, lo, hi, config.crossover_eta, rng)
                else:
                    c1, c2 = p1.genome.copy(), p2.genome.copy()
                offspring.append(Individual(_polynomial_mutation(c1, lo, hi, config.mutation_eta, rate, rng)))
                offspring.append(Individual(_polynomial_mutation(c2, lo, hi, config.mutation_eta, rate, rng)))
            evaluate(offspring, gen)
            population = _select(population + offspring, N)
            archive = _archive_of(population, gen)
            if config.check_archive:
                _check_archive(archive)
            front = _objective_matrix(archive.individuals)
            s = spread(front, prev_front)
            prev_front = front
            change = abs(s - spreads[-1])
            spreads.append(s)
            history.append(_history_entry(gen, archive, s, change))
            if callback:
                callback(gen, population, archive)
            W = config.stall_generations
            if len(spreads) > W + 1:
                recent = np.abs(np.diff(spreads[-(W + 1):]))
                if recent.mean() < config.spread_tolerance:
                    converged = True
                    log.info("spread settled after %d generations", gen)
                    break
    finally:
        if pool is not None:
            pool.shutdown()

    return EvolutionResult(archive, history, population, gen, converged)


def _history_entry(gen, archive, s, change) -> dict:
    return {
        "generation": gen,
        "spread": s,
        "spread_change": change,
        "archive_size": len(archive),
        "objectives": [list(ind.objectives) for ind in archive],
        "genomes": [ind.genome.tolist() for ind in archive],
    }
