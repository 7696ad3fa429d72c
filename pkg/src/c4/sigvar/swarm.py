"""Particle swarm minimizer with fixed golden-ratio coefficients, over
the box of a parameter kind."""

import math
from collections import namedtuple

import numpy as np

from .params import Kind, ParameterVector, LOW, HIGH
from . import util
from . import err


INERTIA = (3. - math.sqrt(5.)) / 2.
COGNITIVE = (1. + math.sqrt(5.)) / 2.
SOCIAL = 1.

DEFAULT_PARTICLES = 30

TraceEntry = namedtuple('TraceEntry', ['iteration', 'local_best', 'best'])


def _coords(x):
    if isinstance(x, ParameterVector):
        return x.as_array()
    return np.asarray(x, dtype=np.float64)


class Particle:

    def __init__(self, position, velocity=None, personal_best=None,
                 personal_best_fitness=math.inf):
        self.position = position
        self.velocity = (np.zeros(len(position)) if velocity is None
                         else np.asarray(velocity, dtype=np.float64))
        self.personal_best = position if personal_best is None else personal_best
        self.personal_best_fitness = personal_best_fitness
        if len(self.velocity) != len(self.position):
            raise err.DimensionMismatch(len(self.position), len(self.velocity), "velocity")

    def __repr__(self):
        return "Particle(pos={}, v={}, best={:.6g})".format(
            self.position, self.velocity, self.personal_best_fitness)


class Swarm:

    def __init__(self, kind, particles, seed):
        self.kind = kind
        self.particles = particles
        self.rng_seed = seed
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.global_best = None
        self.global_best_fitness = math.inf
        self.iteration = 0
        self.trace = []


def sample_position(kind, rng):
    """uniform sample of the box, where the low bound of every
    max-parameter is the just-sampled min-parameter"""
    lo, hi = LOW[kind], HIGH[kind]
    v = []
    for i in range(0, len(lo), 2):
        a = rng.uniform(lo[i], hi[i])
        b = rng.uniform(a, hi[i + 1])
        v += [a, b]
    return ParameterVector(kind, v)


def init_swarm(kind, particle_count, seed):
    kind = Kind.parse(kind)
    if particle_count < 2:
        raise err.InvalidArgument("particle count", particle_count, "need at least 2")
    sw = Swarm(kind, [], seed)
    sw.particles = [Particle(sample_position(kind, sw.rng)) for _ in range(particle_count)]
    return sw


def uniform_draws(rng, dim):
    return rng.random(dim), rng.random(dim)


def update_velocity(p, global_best, rng, r1=None, r2=None):
    pos = _coords(p.position)
    if r1 is None or r2 is None:
        d1, d2 = uniform_draws(rng, len(pos))
        r1 = d1 if r1 is None else r1
        r2 = d2 if r2 is None else r2
    pb = _coords(p.personal_best)
    gb = _coords(global_best)
    if not (len(pb) == len(gb) == len(pos)):
        raise err.DimensionMismatch(len(pos), (len(pb), len(gb)), "particle")
    return (INERTIA * p.velocity
            + COGNITIVE * np.asarray(r1) * (pb - pos)
            + SOCIAL * np.asarray(r2) * (gb - pos))


def update_position(p, v_new):
    raw = _coords(p.position) + np.asarray(v_new, dtype=np.float64)
    return ParameterVector.repaired(p.position.kind, raw)


def _serial_map(fn, items):
    return [fn(i) for i in items]


def optimize(fitness, kind, iterations, particle_count=DEFAULT_PARTICLES, seed=0,
             map_fn=None, stochastic=False, draws=uniform_draws):
    """minimize fitness over the box of kind.

    Every particle is re-evaluated on every iteration. When stochastic is
    set, fitness is called as fitness(position, rng) with a generator
    seeded from (seed, iteration, particle index), so that evaluations can
    run in any order (map_fn(fn, items) may be parallel).

    Returns (best, best_fitness, trace), trace holding one TraceEntry per
    iteration with the best fitness of that iteration and of all time.
    """
    if iterations < 1:
        raise err.InvalidArgument("iteration count", iterations, "need at least 1")
    map_fn = _serial_map if map_fn is None else map_fn
    sw = init_swarm(kind, particle_count, seed)
    for n in range(iterations):
        sw.iteration = n
        positions = [p.position for p in sw.particles]
        if stochastic:
            def job(ip, _n=n):
                i, pos = ip
                return fitness(pos, np.random.default_rng([seed, _n, i]))
        else:
            def job(ip):
                return fitness(ip[1])
        values = map_fn(job, list(enumerate(positions)))
        local_best = math.inf
        for i, (p, f) in enumerate(zip(sw.particles, values)):
            f = float(f)
            if not math.isfinite(f):
                raise err.NonFiniteFitness(n, i, f)
            if f < p.personal_best_fitness:
                p.personal_best = p.position
                p.personal_best_fitness = f
            if f < local_best:
                local_best = f
            if f < sw.global_best_fitness:
                sw.global_best = p.position
                sw.global_best_fitness = f
        sw.trace.append(TraceEntry(n, local_best, sw.global_best_fitness))
        util.logdbg("swarm: iteration {}: local {:.6g} best {:.6g}".format(
            n, local_best, sw.global_best_fitness))
        if n + 1 < iterations:
            for p in sw.particles:
                r1, r2 = draws(sw.rng, len(p.position))
                p.velocity = update_velocity(p, sw.global_best, sw.rng, r1, r2)
                p.position = update_position(p, p.velocity)
    sw.iteration = iterations
    return sw.global_best, sw.global_best_fitness, sw.trace
