#!/usr/bin/env python3

import unittest as ut
import os.path as osp
import tempfile

import numpy as np
from scipy.optimize import minimize

import c4.sigvar.verify as verify
import c4.sigvar.err as err


def blobs(seed=0, p=10, n=30, spread=0.3, distance=5.):
    rng = np.random.default_rng(seed)
    pos = rng.normal(0., spread, (p, 2))
    neg = rng.normal(distance, spread, (n, 2))
    return verify.TrainingSet(pos, neg)


def reference_dual(x, y, cost, gamma):
    """the same dual problem, by a general-purpose constrained solver"""
    q = np.outer(y, y) * verify.rbf(x, x, gamma)
    def f(a):
        return 0.5 * a @ q @ a - a.sum()
    def jac(a):
        return q @ a - 1.
    res = minimize(f, np.zeros(len(y)), jac=jac, method='SLSQP',
                   bounds=[(0., c) for c in cost],
                   constraints=[{'type': 'eq', 'fun': lambda a: y @ a, 'jac': lambda a: y}],
                   options={'ftol': 1e-14, 'maxiter': 1000})
    return res.fun


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
class Test00weights(ut.TestCase):

    def test00skew(self):
        self.assertEqual(verify.class_weights(1, 8134), (8134., 1.))
        self.assertEqual(verify.class_weights(12, 8134), (8134. / 12., 1.))
        self.assertEqual(14 * 581, 8134)

    def test01errors(self):
        with self.assertRaises(err.InvalidArgument):
            verify.class_weights(0, 10)
        with self.assertRaises(err.InvalidArgument):
            verify.class_weights(1, 0)

    def test02default_gamma(self):
        self.assertEqual(verify.default_gamma([[0., 0.], [2., 2.]]), 0.5)
        self.assertEqual(verify.default_gamma([[1., 1., 1., 1.]]), 0.25)

    def test03training_set(self):
        ts = blobs(p=2, n=3)
        x, y = ts.data()
        self.assertEqual(x.shape, (5, 2))
        np.testing.assert_array_equal(y, [1., 1., -1., -1., -1.])
        with self.assertRaises(err.InvalidArgument):
            verify.TrainingSet(np.zeros((0, 2)), np.zeros((3, 2)))
        with self.assertRaises(err.DimensionMismatch):
            verify.TrainingSet(np.zeros((1, 2)), np.zeros((3, 4)))


# -----------------------------------------------------------------------------
class Test01smo(ut.TestCase):

    def test00matches_reference_solver(self):
        rng = np.random.default_rng(0)
        for instance in range(50):
            with self.subTest(instance=instance):
                n = int(rng.integers(4, 21))
                p = int(rng.integers(1, n // 2 + 1))
                pos = rng.uniform(0., 2., (p, 3)) + 0.5
                neg = rng.uniform(0., 2., (n - p, 3))
                ts = verify.TrainingSet(pos, neg)
                c = verify.train_wd_classifier(ts, 2., tol=1e-6)
                x, y = ts.data()
                cp, cm = verify.class_weights(p, n - p)
                ref = reference_dual(x, y, np.where(y > 0, cp, cm), 2.)
                self.assertLessEqual(abs(c.objective - ref), 1e-4 * max(1., abs(ref)))

    def test01feasible(self):
        ts = blobs(3, p=8, n=30, spread=1., distance=1.)
        c = verify.train_wd_classifier(ts, 0.5, tol=1e-6)
        x, y = ts.data()
        cp, cm = verify.class_weights(8, 30)
        cost = np.where(y > 0, cp, cm)
        self.assertAlmostEqual(float(y @ c.alphas), 0., places=9)
        self.assertTrue(np.all(c.alphas >= 0.))
        self.assertTrue(np.all(c.alphas <= cost + 1e-12))
        self.assertLessEqual(c.violation, 1e-6)

    def test02free_vectors_sit_on_the_margin(self):
        ts = blobs(3, p=8, n=30, spread=1., distance=1.)
        c = verify.train_wd_classifier(ts, 0.5, tol=1e-6)
        x, y = ts.data()
        cp, cm = verify.class_weights(8, 30)
        cost = np.where(y > 0, cp, cm)
        free = (c.alphas > 1e-9) & (c.alphas < cost - 1e-9)
        self.assertTrue(free.any())
        margins = y[free] * c.scores(x[free])
        np.testing.assert_allclose(margins, 1., rtol=0, atol=1e-4)

    def test03small_cache_gives_the_same_solution(self):
        ts = blobs(4, p=5, n=25, spread=1., distance=1.5)
        full = verify.train_wd_classifier(ts, 0.5)
        small = verify.train_wd_classifier(ts, 0.5, cache_mb=1e-6)
        np.testing.assert_allclose(small.alphas, full.alphas, rtol=0, atol=1e-12)
        self.assertEqual(small.iterations, full.iterations)

    def test04not_converged(self):
        with self.assertRaises(err.SvmNotConverged):
            verify.train_wd_classifier(blobs(5, spread=1., distance=1.), 0.5, max_iter=1)

    def test05bad_gamma(self):
        with self.assertRaises(err.InvalidArgument):
            verify.train_wd_classifier(blobs(), 0.)


class Test02decisions(ut.TestCase):

    def test00separable(self):
        ts = blobs(6)
        c = verify.train_wd_classifier(ts, 0.5)
        self.assertTrue(np.all(c.scores(ts.positives) > 0.))
        self.assertTrue(np.all(c.scores(ts.negatives) < 0.))
        self.assertGreater(verify.decision_score(c, (0.1, -0.1)), 0.)
        self.assertLess(verify.decision_score(c, (5.1, 4.9)), 0.)
        np.testing.assert_array_equal(verify.decision_scores(c, ts.positives), c.scores(ts.positives))

    def test01lone_positive(self):
        rng = np.random.default_rng(7)
        neg = rng.uniform(-2., 2., (200, 2))
        neg = neg[np.linalg.norm(neg, axis=1) > 0.7][:60]
        ts = verify.TrainingSet([[0., 0.]], neg)
        c = verify.train_wd_classifier(ts, 1.)
        self.assertGreater(verify.decision_score(c, (0., 0.)), 0.)

    def test02dimension_mismatch(self):
        c = verify.train_wd_classifier(blobs(), 0.5)
        with self.assertRaises(err.DimensionMismatch):
            verify.decision_score(c, (1., 2., 3.))


# -----------------------------------------------------------------------------
class Test03files(ut.TestCase):

    def test00text_and_binary(self):
        ts = blobs(8, spread=1., distance=2.)
        c = verify.train_wd_classifier(ts, 0.5)
        queries = np.random.default_rng(9).normal(1., 1.5, (20, 2))
        with tempfile.TemporaryDirectory() as d:
            for binary in (False, True):
                with self.subTest(binary=binary):
                    path = osp.join(d, 'c.bin' if binary else 'c.txt')
                    verify.save_classifier(path, c, binary)
                    back = verify.load_classifier(path)
                    self.assertEqual(back.gamma, c.gamma)
                    self.assertEqual(back.bias, c.bias)
                    np.testing.assert_array_equal(back.scores(queries), c.scores(queries))

    def test01text_header(self):
        c = verify.Classifier(0.25, [[1., 2.]], [0.5], -0.125)
        with tempfile.TemporaryDirectory() as d:
            path = osp.join(d, 'c.txt')
            verify.save_classifier(path, c)
            with open(path) as f:
                lines = f.read().splitlines()
        self.assertEqual(lines, ['sigvar-classifier version=1', 'gamma=0.25', 'bias=-0.125',
                                 'dim=2', 'count=1', '0.5,1.0,2.0'])

    def test02errors(self):
        with tempfile.TemporaryDirectory() as d:
            path = osp.join(d, 'c.txt')
            with open(path, 'w') as f:
                f.write("not a classifier\n")
            with self.assertRaises(err.ParseError):
                verify.load_classifier(path)
            with open(path, 'w') as f:
                f.write("sigvar-classifier version=9\ngamma=1\nbias=0\ndim=1\ncount=0\n")
            with self.assertRaises(err.SchemaVersionError):
                verify.load_classifier(path)
            with open(path, 'w') as f:
                f.write("sigvar-classifier version=1\ngamma=1\nbias=0\ndim=2\ncount=1\n0.5,1.0\n")
            with self.assertRaises(err.ParseError):
                verify.load_classifier(path)


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
if __name__ == '__main__':
    ut.main()
