#!/usr/bin/env python3

import unittest as ut
import math

import numpy as np
from hypothesis import given, settings, strategies as st

import c4.sigvar.metrics as metrics
import c4.sigvar.err as err


def reference_widths(clusters):
    """straight from the definition, one member at a time"""
    out = []
    for k, c in enumerate(clusters):
        for i, x in enumerate(c):
            if len(c) == 1:
                out.append(0.)
                continue
            a = sum(math.dist(x, y) for j, y in enumerate(c) if j != i) / (len(c) - 1)
            b = min(sum(math.dist(x, y) for y in o) / len(o)
                    for l, o in enumerate(clusters) if l != k)
            m = max(a, b)
            out.append(0. if m == 0. else (b - a) / m)
    return out


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
class Test00silhouette(ut.TestCase):

    def test00hand_computed(self):
        a = [(0., 0.), (0., 1.)]
        b = [(3., 0.)]
        expected = (2. / 3. + (1. - 1. / math.sqrt(10.))) / 3.
        self.assertAlmostEqual(metrics.abs_silhouette([a, b]), expected, places=12)
        w = metrics.silhouette_widths([a, b])
        self.assertAlmostEqual(w[0][0], 2. / 3., places=12)
        self.assertEqual(w[1][0], 0.)

    def test01single_member_matches_bulk(self):
        a = [(0., 0.), (0., 1.), (1., 1.)]
        b = [(3., 0.), (4., 1.)]
        bulk = metrics.silhouette_widths([a, b])
        for i in range(3):
            self.assertAlmostEqual(metrics.silhouette_width(i, a, [b]), bulk[0][i], places=12)
        self.assertEqual(metrics.silhouette_width(0, [(1., 1.)], [b]), 0.)

    def test02matches_reference(self):
        rng = np.random.default_rng(12345)
        for instance in range(200):
            with self.subTest(instance=instance):
                dim = int(rng.integers(1, 6))
                nclusters = int(rng.integers(2, 4))
                clusters = [rng.normal(rng.normal(0, 3, dim), 1., (int(rng.integers(1, 8)), dim))
                            for _ in range(nclusters)]
                got = np.concatenate(metrics.silhouette_widths(clusters))
                ref = reference_widths([[tuple(x) for x in c] for c in clusters])
                np.testing.assert_allclose(got, ref, rtol=0, atol=1e-9)

    def test03mirrored_clusters(self):
        rng = np.random.default_rng(3)
        g = rng.normal(0., 1., (10, 4))
        # every member has a twin at distance zero in the other cluster
        self.assertAlmostEqual(metrics.abs_silhouette([g, g.copy()]), 1. / 10., places=12)

    def test04well_separated(self):
        rng = np.random.default_rng(4)
        a = rng.normal(0., 0.01, (10, 3))
        b = rng.normal(100., 0.01, (10, 3))
        self.assertGreater(metrics.abs_silhouette([a, b]), 0.99)

    def test05range(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            w = np.concatenate(metrics.silhouette_widths([rng.normal(size=(5, 2)), rng.normal(size=(6, 2))]))
            self.assertTrue(np.all(w >= -1.) and np.all(w <= 1.))


_coords = st.integers(min_value=-50, max_value=50).map(float)
_point = st.tuples(_coords, _coords)
_cluster = st.lists(_point, min_size=2, max_size=6)


class Test01invariance(ut.TestCase):

    @settings(max_examples=60, deadline=None)
    @given(a=_cluster, b=_cluster,
           shift=st.tuples(_coords, _coords),
           scale=st.sampled_from([0.125, 0.5, 2., 8.]))
    def test00translation_and_scaling(self, a, b, shift, scale):
        base = metrics.abs_silhouette([a, b])
        moved = [np.asarray(c) * scale + np.asarray(shift) for c in (a, b)]
        self.assertAlmostEqual(metrics.abs_silhouette(moved), base, places=6)

    @settings(max_examples=40, deadline=None)
    @given(a=_cluster, b=_cluster)
    def test01cluster_order(self, a, b):
        self.assertAlmostEqual(metrics.abs_silhouette([a, b]), metrics.abs_silhouette([b, a]), places=9)


# -----------------------------------------------------------------------------
class Test02cohesion(ut.TestCase):

    def test00basic(self):
        self.assertEqual(metrics.cohesion([(0., 0.), (2., 0.)]), 2.)
        self.assertEqual(metrics.cohesion([(1., 1.)]), 0.)

    def test01translation(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(7, 3))
        self.assertAlmostEqual(metrics.cohesion(x), metrics.cohesion(x + 5.), places=9)


class Test03errors(ut.TestCase):

    def test00one_cluster(self):
        with self.assertRaises(err.NotEnoughClusters):
            metrics.abs_silhouette([[(0., 0.), (1., 1.)]])

    def test01empty_cluster(self):
        with self.assertRaises(err.EmptyCluster):
            metrics.abs_silhouette([metrics.Cluster([(0., 0.)], 'g'), metrics.Cluster([], 's')])
        with self.assertRaises(err.EmptyCluster):
            metrics.cohesion([])

    def test02dimension_mismatch(self):
        with self.assertRaises(err.DimensionMismatch):
            metrics.abs_silhouette([[(0., 0.), (1., 1.)], [(0., 0., 0.)]])
        with self.assertRaises(err.DimensionMismatch):
            metrics.euclidean((0., 0.), (0., 0., 0.))

    def test03unknown_dissimilarity(self):
        with self.assertRaises(err.InvalidArgument):
            metrics.abs_silhouette([[(0., 0.)], [(1., 1.)]], dissimilarity='cosine')

    def test04euclidean(self):
        self.assertEqual(metrics.euclidean((0., 0.), (3., 4.)), 5.)

    def test05member_index(self):
        own, other = [(0., 0.), (1., 1.)], [(5., 5.)]
        for i in (2, -1, 7, 0.5):
            with self.subTest(i=i):
                with self.assertRaises(err.InvalidArgument):
                    metrics.silhouette_width(i, own, [other])
        with self.assertRaises(err.InvalidArgument):
            metrics.silhouette_width(1, [(1., 1.)], [other])
        self.assertEqual(metrics.silhouette_width(np.int64(1), own, [other]),
                         metrics.silhouette_width(1, own, [other]))


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
if __name__ == '__main__':
    ut.main()
