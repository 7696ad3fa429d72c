"""Feature-space augmentation: synthetic feature vectors from a genuine
vector and a (sigma_min, sigma_max) Gaussian filter parameter vector."""

import math

import numpy as np
from scipy.ndimage import convolve1d

from .params import Kind, ParameterVector
from . import metrics
from . import err


SMOOTH = 'smooth'
NOISE = 'noise'
MODES = (SMOOTH, NOISE)


def gaussian_density(x, sigma):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x * x / (2. * sigma * sigma)) / (math.sqrt(2. * math.pi) * sigma)


def kernel_radius(sigma):
    return max(1, int(math.ceil(4. * sigma)))


def gaussian_kernel(sigma, radius=None):
    """the gaussian density sampled at the integers of [-radius, radius],
    normalized to sum 1"""
    if not sigma > 0.:
        raise err.InvalidArgument("sigma", sigma, "must be positive")
    if radius is None:
        radius = kernel_radius(sigma)
    if radius < 1:
        raise err.InvalidArgument("kernel radius", radius, "must be at least 1")
    w = gaussian_density(np.arange(-radius, radius + 1), sigma)
    return w / w.sum()


def _gaussian_params(params):
    if not isinstance(params, ParameterVector):
        params = ParameterVector(Kind.GAUSSIAN, params)
    if params.kind != Kind.GAUSSIAN:
        raise err.InvalidParameterVector(params.kind.value, params.values,
                                         "expected a gaussian parameter vector")
    return params


def filter_vector(v, sigma, rng=None, mode=SMOOTH):
    """one synthetic vector at a given sigma"""
    k = gaussian_kernel(sigma)
    if mode == SMOOTH:
        return convolve1d(v, k, mode='reflect')
    elif mode == NOISE:
        noise = rng.standard_normal(v.shape[0])
        return v + sigma * convolve1d(noise, k, mode='reflect')
    raise err.InvalidArgument("feature augmentation mode", mode, "use smooth|noise")


def perturb_features(v, params, n, rng, mode=SMOOTH):
    """n synthetic vectors from v, each with its own sigma drawn
    uniformly from [sigma_min, sigma_max]. Returns an (n, D) array."""
    params = _gaussian_params(params)
    if n < 1:
        raise err.InvalidArgument("sample count", n, "need at least 1")
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size == 0:
        raise err.DimensionMismatch("at least 1", 0)
    lo, hi = params.values
    out = np.empty((n, v.shape[0]))
    for k in range(n):
        sigma = rng.uniform(lo, hi)
        out[k] = filter_vector(v, sigma, rng, mode)
    return out


def synthesize_cluster(genuine, params, n_per, rng, mode=SMOOTH):
    """n_per synthetic vectors for each genuine vector, in genuine order"""
    genuine = metrics.as_vectors(genuine)
    if n_per < 1:
        return np.empty((0, genuine.shape[1]))
    return np.concatenate([perturb_features(g, params, n_per, rng, mode) for g in genuine])


def eval_params_feature(params, genuine, n_per, rng, mode=SMOOTH, writer=None):
    """|silhouette| between the genuine vectors and their synthetic
    counterparts"""
    genuine = metrics.as_vectors(genuine)
    if genuine.shape[0] < 2:
        raise err.InsufficientSamples(writer if writer is not None else "?",
                                      "genuine vectors", 2, genuine.shape[0])
    synthetic = synthesize_cluster(genuine, params, n_per, rng, mode)
    return metrics.abs_silhouette([metrics.Cluster(genuine, 'genuine'),
                                   metrics.Cluster(synthetic, 'synthetic')])
