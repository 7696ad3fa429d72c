"""Cluster quality: pairwise dissimilarity, silhouette widths and
cohesion. All functions are pure."""

import numpy as np
from scipy.spatial.distance import cdist

from .named_item import NamedItem
from . import err


# only the euclidean distance is shipped; the registry maps names to
# scipy.spatial.distance metrics
DISSIMILARITIES = {
    'euclidean': 'euclidean',
}


def _metric(dissimilarity):
    try:
        return DISSIMILARITIES[dissimilarity]
    except KeyError:
        raise err.InvalidArgument("dissimilarity", dissimilarity,
                                  "known: {}".format(", ".join(DISSIMILARITIES)))


def as_vectors(members, dim=None):
    """stack a sequence of feature vectors into an (n, D) float64 array"""
    a = np.asarray(members, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, dim or 0)
    if a.ndim != 2:
        raise err.DimensionMismatch("a sequence of vectors", a.shape, "cluster")
    if dim is not None and a.shape[0] and a.shape[1] != dim:
        raise err.DimensionMismatch(dim, a.shape[1])
    return a


class Cluster(NamedItem):
    """a labeled group of feature vectors of one dimension"""

    def __init__(self, members, label=None):
        super().__init__(label)
        self.members = as_vectors(members)

    def __len__(self):
        return self.members.shape[0]

    @property
    def dim(self):
        return self.members.shape[1]


def _as_cluster(c):
    return c if isinstance(c, Cluster) else Cluster(c)


# -----------------------------------------------------------------------------
def euclidean(u, v):
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise err.DimensionMismatch(u.shape[0], v.shape[0])
    d = u - v
    return float(np.sqrt(np.dot(d, d)))


def silhouette_width(i, own, others, dissimilarity='euclidean'):
    """the silhouette width of member i of cluster own, against the
    clusters in others. Singleton clusters have width 0."""
    own = _as_cluster(own)
    others = [_as_cluster(c) for c in others]
    if len(own) == 0:
        raise err.EmptyCluster(own.name)
    if not isinstance(i, (int, np.integer)) or not 0 <= i < len(own):
        raise err.InvalidArgument("member index", i, "expected an integer in [0, {})".format(len(own)))
    others = [c for c in others if len(c) > 0]
    if not others:
        raise err.NotEnoughClusters(1)
    for c in others:
        if c.dim != own.dim:
            raise err.DimensionMismatch(own.dim, c.dim)
    if len(own) == 1:
        return 0.
    metric = _metric(dissimilarity)
    x = own.members[i:i + 1]
    a = cdist(x, own.members, metric)[0].sum() / (len(own) - 1)
    b = min(cdist(x, c.members, metric)[0].mean() for c in others)
    return _width(a, b)


def _width(a, b):
    m = max(a, b)
    if m == 0.:
        return 0.
    return float((b - a) / m)


def silhouette_widths(clusters, dissimilarity='euclidean'):
    """the silhouette width of every member of every cluster, as a list
    with one array per cluster"""
    clusters = _checked(clusters)
    metric = _metric(dissimilarity)
    data = np.concatenate([c.members for c in clusters])
    dist = cdist(data, data, metric)
    bounds = np.cumsum([0] + [len(c) for c in clusters])
    out = []
    for k, c in enumerate(clusters):
        s = slice(bounds[k], bounds[k + 1])
        if len(c) == 1:
            out.append(np.zeros(1))
            continue
        a = dist[s, s].sum(axis=1) / (len(c) - 1)
        b = np.min([dist[s, bounds[j]:bounds[j + 1]].mean(axis=1)
                    for j in range(len(clusters)) if j != k], axis=0)
        m = np.maximum(a, b)
        with np.errstate(invalid='ignore', divide='ignore'):
            w = np.where(m > 0., (b - a) / np.where(m > 0., m, 1.), 0.)
        out.append(w)
    return out


def abs_silhouette(clusters, dissimilarity='euclidean'):
    """absolute value of the mean silhouette width over all members of
    all clusters"""
    widths = silhouette_widths(clusters, dissimilarity)
    return float(abs(np.concatenate(widths).mean()))


def cohesion(c):
    """sum of squared distances of the members to the cluster centroid"""
    c = _as_cluster(c)
    if len(c) == 0:
        raise err.EmptyCluster(c.name)
    d = c.members - c.members.mean(axis=0)
    return float(np.sum(d * d))


def _checked(clusters):
    clusters = [_as_cluster(c) for c in clusters]
    if len(clusters) < 2:
        raise err.NotEnoughClusters(len(clusters))
    for c in clusters:
        if len(c) == 0:
            raise err.EmptyCluster(c.name)
        if c.dim != clusters[0].dim:
            raise err.DimensionMismatch(clusters[0].dim, c.dim)
    return clusters
