#!/usr/bin/env python3

import unittest as ut
import os.path as osp
import json
import tempfile

import numpy as np

import c4.sigvar.orchestrate as orch
import c4.sigvar.augment_image as ai
import c4.sigvar.synthetic as synthetic
import c4.sigvar.ingest as ingest
import c4.sigvar.err as err
from c4.sigvar.params import Kind, ParameterVector, PASSTHROUGH_DEFAULTS


def feature_sets(writers=3, genuine=8, dim=12, seed=0):
    vs = synthetic.make_feature_writers(writers, genuine, 0, dim, seed)
    return [orch.WriterSet(wid, kinds[ingest.GENUINE]) for wid, kinds in vs.items()]


def image_sets(writers=2, genuine=3, seed=0):
    out = []
    for k in range(writers):
        gen, _ = synthetic.make_writer(np.random.default_rng([seed, k]), genuine, 0)
        out.append(orch.WriterSet("{:03d}".format(k + 1), gen))
    return out


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
class Test00optimize(ut.TestCase):

    def test00feature_mode(self):
        sets = feature_sets()
        res = orch.sigvar_optimize(sets, 'feature', iterations=3, swarm_size=4, seed=1)
        self.assertEqual(res.kind, Kind.GAUSSIAN)
        self.assertEqual(list(res.per_writer.keys()), ['1', '2', '3'])
        self.assertEqual(res.average, ParameterVector.mean(r.best for r in res.per_writer.values()))
        for r in res.per_writer.values():
            self.assertEqual(len(r.trace), 3)
            self.assertEqual(r.fitness, r.trace[-1].best)
            self.assertTrue(r.best.within_bounds())
        self.assertEqual(res.skipped, [])
        self.assertIsNone(res.passthrough)

    def test01writer_seeds_do_not_depend_on_the_others(self):
        sets = feature_sets()
        full = orch.sigvar_optimize(sets, 'feature', iterations=3, swarm_size=4, seed=1)
        alone = orch.sigvar_optimize(sets[1:2], 'feature', iterations=3, swarm_size=4, seed=1)
        self.assertEqual(full.per_writer['2'].best, alone.per_writer['2'].best)

    def test02parallel_equals_serial(self):
        sets = feature_sets()
        a = orch.sigvar_optimize(sets, 'feature', iterations=3, swarm_size=4, seed=2, jobs=1)
        b = orch.sigvar_optimize(sets, 'feature', iterations=3, swarm_size=4, seed=2, jobs=3)
        self.assertEqual(orch.result_as_dict(a), orch.result_as_dict(b))

    def test03skip_and_abort(self):
        sets = feature_sets()
        sets.append(orch.WriterSet('lonely', sets[0].genuine[:1]))
        res = orch.sigvar_optimize(sets, 'feature', iterations=2, swarm_size=3)
        self.assertEqual(res.skipped, ['lonely'])
        self.assertNotIn('lonely', res.per_writer)
        with self.assertRaises(err.InsufficientSamples):
            orch.sigvar_optimize(sets, 'feature', iterations=2, swarm_size=3, on_error='abort')
        with self.assertRaises(err.DataError):
            orch.sigvar_optimize(sets[-1:], 'feature', iterations=2, swarm_size=3)

    def test04image_mode(self):
        sets = image_sets()
        res = orch.sigvar_optimize(sets, 'image', iterations=2, swarm_size=2, seed=0,
                                   canvas=synthetic.CANVAS)
        self.assertEqual(res.kind, Kind.DUPLICATOR)
        self.assertEqual(len(res.per_writer), 2)
        self.assertEqual(res.settings['canvas'], list(synthetic.CANVAS))
        self.assertEqual(list(res.passthrough.keys()), list(PASSTHROUGH_DEFAULTS.keys()))
        for r in res.per_writer.values():
            self.assertGreaterEqual(r.fitness, 0.)
            self.assertLessEqual(r.fitness, 1.)

    def test05errors(self):
        with self.assertRaises(err.InvalidArgument):
            orch.sigvar_optimize([], 'feature')
        with self.assertRaises(err.InvalidArgument):
            orch.sigvar_optimize(feature_sets(), 'feature', on_error='retry')
        with self.assertRaises(err.InvalidArgument):
            orch.optimize_writer(image_sets(1)[0], 'image', iterations=1, swarm_size=2)


class Test01writer_sets(ut.TestCase):

    def test00from_vectors(self):
        with tempfile.TemporaryDirectory() as d:
            data = ingest.load_manifest(synthetic.make_feature_dataset(d, writers=3, genuine=4, dim=6))
            sets = orch.writer_sets(data, 'feature')
            self.assertEqual([s.writer_id for s in sets], ['1', '2', '3'])
            self.assertEqual(sets[0].genuine.shape, (4, 6))
            self.assertEqual(len(orch.writer_sets(data, 'feature', ids=['2'])), 1)
            with self.assertRaises(err.InvalidArgument):
                orch.writer_sets(data, 'feature', ids=['9'])
            with self.assertRaises(err.DataError):
                orch.writer_sets(data, 'image')

    def test01from_images(self):
        with tempfile.TemporaryDirectory() as d:
            data = ingest.load_manifest(synthetic.make_dataset(d, writers=2, genuine=3, skilled=1))
            imgs = orch.writer_sets(data, 'image')
            self.assertEqual(len(imgs[0]), 3)
            feats = orch.writer_sets(data, 'feature')
            self.assertEqual(feats[0].genuine.shape, (3, 550))


# -----------------------------------------------------------------------------
class Test02files(ut.TestCase):

    def test00save_load(self):
        res = orch.sigvar_optimize(feature_sets(), 'feature', iterations=2, swarm_size=3, seed=4,
                                   fingerprint='abc')
        with tempfile.TemporaryDirectory() as d:
            path = osp.join(d, 'p.json')
            orch.save_parameters(path, res)
            with open(path) as f:
                raw = json.load(f)
            back = orch.load_parameters(path)
        self.assertEqual(raw['schema'], 1)
        self.assertEqual(raw['kind'], 'gaussian')
        self.assertEqual(list(raw['average'].keys()), ['sigma_min', 'sigma_max'])
        self.assertEqual(back.average, res.average)
        self.assertEqual(back.seed, 4)
        self.assertEqual(back.fingerprint, 'abc')
        self.assertEqual(list(back.per_writer.keys()), list(res.per_writer.keys()))
        for wid, r in res.per_writer.items():
            self.assertEqual(back.per_writer[wid].best, r.best)
            self.assertEqual(back.per_writer[wid].trace, r.trace)
        self.assertEqual(orch.result_as_dict(back), orch.result_as_dict(res))

    def test01shipped(self):
        dup = orch.load_vector('pi_dup')
        self.assertEqual(dup.average.values, (69.3, 88.7, 0.32, 0.53, 0.47, 0.74))
        self.assertEqual(len(dup.settings['writers']), 20)
        self.assertEqual(len(dup.passthrough), 24)
        gauss = orch.load_vector('pi_gauss')
        self.assertEqual(gauss.average.values, (0.29, 0.72))
        self.assertEqual(gauss.kind, Kind.GAUSSIAN)
        default = orch.load_vector('pi_def')
        self.assertEqual(default.average.values, (5., 30., 0.5, 1., 0., 1.))
        self.assertEqual(dict(default.passthrough), dict(PASSTHROUGH_DEFAULTS))
        cfg = ai.DuplicatorConfig(dup.average, dup.passthrough)
        self.assertEqual(cfg.passthrough['psi'], 0.8)

    def test02hand_written(self):
        with tempfile.TemporaryDirectory() as d:
            path = osp.join(d, 'p.json')
            with open(path, 'w') as f:
                json.dump({'average': {'sigma_min': 0.1, 'sigma_max': 0.2}}, f)
            res = orch.load_parameters(path)
        self.assertEqual(res.kind, Kind.GAUSSIAN)
        self.assertEqual(res.per_writer, {})

    def test03errors(self):
        with tempfile.TemporaryDirectory() as d:
            path = osp.join(d, 'p.json')
            with open(path, 'w') as f:
                json.dump({'schema': 2, 'average': {'sigma_min': 0.1, 'sigma_max': 0.2}}, f)
            with self.assertRaises(err.SchemaVersionError):
                orch.load_parameters(path)
            with open(path, 'w') as f:
                json.dump({'schema': 1}, f)
            with self.assertRaises(err.ParseError):
                orch.load_parameters(path)
            with open(path, 'w') as f:
                f.write('{"schema": ')
            with self.assertRaises(err.ParseError):
                orch.load_parameters(path)
            with self.assertRaises(err.ConfigFileNotFound):
                orch.load_vector(osp.join(d, 'absent.json'))


# -----------------------------------------------------------------------------
class Test03validation(ut.TestCase):

    def test00sweep(self):
        sets = feature_sets(writers=2)
        sigmas = [0.1, 0.5, 1., 2.5]
        rows = orch.sweep_sigma(sets, sigmas)
        self.assertEqual(len(rows), 2 * 4)
        self.assertEqual([(r.writer, r.sigma) for r in rows[:4]], [('1', s) for s in sigmas])
        for r in rows:
            self.assertGreaterEqual(r.abs_silhouette, 0.)
            self.assertLessEqual(r.abs_silhouette, 1.)
        self.assertEqual(rows, orch.sweep_sigma(sets, sigmas))

    def test01sweep_needs_two(self):
        with self.assertRaises(err.InsufficientSamples):
            orch.sweep_sigma([orch.WriterSet('x', np.zeros((1, 3)))], [0.5])

    def test02compare_vectors(self):
        sets = feature_sets()
        vectors = {'near': ParameterVector(Kind.GAUSSIAN, (0.01, 0.01)),
                   'far': ParameterVector(Kind.GAUSSIAN, (1., 1.))}
        rows = orch.validate_features(sets, vectors)
        self.assertEqual([r.name for r in rows], ['near', 'far'])
        near = rows[0]
        self.assertEqual(near.writers, 3)
        self.assertAlmostEqual(near.abs_mean, 1. / 8., places=9)
        # near-identity copies have the cohesion of the genuine cluster
        self.assertAlmostEqual(near.synthetic_cohesion_mean, near.cohesion_mean, places=9)
        self.assertEqual(rows[0].cohesion_mean, rows[1].cohesion_mean)

    def test03duplicator_needs_images(self):
        with self.assertRaises(err.DataError):
            orch.validate_features(feature_sets(), {'dup': ParameterVector(Kind.DUPLICATOR, (60, 80, 0.5, 1, 0, 1))})

    def test04images(self):
        rows = orch.validate_features(image_sets(), {'dup': ParameterVector(Kind.DUPLICATOR, (60, 80, 0.5, 1, 0, 1)),
                                                     'gauss': ParameterVector(Kind.GAUSSIAN, (0.29, 0.72))},
                                      canvas=synthetic.CANVAS)
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[0].cohesion_mean, rows[1].cohesion_mean)


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
if __name__ == '__main__':
    ut.main()
