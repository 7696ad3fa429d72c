#!/usr/bin/env python3

import unittest as ut
import os
import os.path as osp
import stat
import tempfile

import numpy as np

import c4.sigvar.augment_image as ai
import c4.sigvar.features as features
import c4.sigvar.synthetic as synthetic
import c4.sigvar.err as err
from c4.sigvar.params import Kind, ParameterVector
from c4.sigvar.image import SignatureImage, Polarity


def writer_images(seed=0, genuine=3):
    rng = np.random.default_rng(seed)
    gen, _ = synthetic.make_writer(rng, genuine, 0)
    return gen


def fixed(amplitude, period=0.5, phase=0.25):
    return ParameterVector(Kind.DUPLICATOR, (amplitude, amplitude, period, period, phase, phase))


def write_script(d, name, body):
    path = osp.join(d, name)
    with open(path, 'w') as f:
        f.write("#!/bin/sh\n" + body)
    os.chmod(path, os.stat(path).st_mode | stat.S_IXUSR)
    return path


COPYING_DUPLICATOR = """
while [ $# -gt 0 ]; do
  case "$1" in
    --params) params="$2"; shift 2;;
    --input) in="$2"; shift 2;;
    --output-dir) out="$2"; shift 2;;
    --count) n="$2"; shift 2;;
    *) shift 2;;
  esac
done
grep -q '^psi=0.8$' "$params" || exit 7
i=0
while [ $i -lt $n ]; do cp "$in" "$out/dup$i.png"; i=$((i+1)); done
"""


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
class Test00deform(ut.TestCase):

    def test00huge_amplitude_is_identity(self):
        img = writer_images()[0]
        out = ai.sinusoidal_deform(img, (1e9, 1e9, 0.5, 1., 0., 1.), np.random.default_rng(0))
        self.assertEqual(out, img)

    def test01blank_stays_blank(self):
        img = SignatureImage(np.full((60, 80), 255, dtype=np.uint8))
        out = ai.sinusoidal_deform(img, (5., 30., 0.5, 1., 0., 1.), np.random.default_rng(0))
        self.assertTrue(out.is_blank())

    def test02deterministic(self):
        img = writer_images()[0]
        v = ParameterVector(Kind.DUPLICATOR, (5., 30., 0.5, 1., 0., 1.))
        a = ai.sinusoidal_deform(img, v, np.random.default_rng(11))
        b = ai.sinusoidal_deform(img, v, np.random.default_rng(11))
        c = ai.sinusoidal_deform(img, v, np.random.default_rng(12))
        self.assertEqual(a, b)
        self.assertNotEqual(a, c)
        self.assertEqual(a.shape, img.shape)
        self.assertEqual(a.polarity, img.polarity)

    def test03ink_is_roughly_preserved(self):
        img = writer_images()[0]
        v = ParameterVector(Kind.DUPLICATOR, (80., 100., 0.5, 1., 0., 1.))
        rng = np.random.default_rng(3)
        mass = img.ink().sum()
        for _ in range(10):
            out = ai.sinusoidal_deform(img, v, rng)
            self.assertLess(abs(out.ink().sum() - mass) / mass, 0.05)

    def test04smaller_amplitude_deforms_more(self):
        # displacements stay below the stroke width
        img = writer_images()[0]
        change = []
        for amplitude in (80., 160., 320.):
            out = ai.sinusoidal_deform(img, fixed(amplitude), np.random.default_rng(0))
            change.append(np.abs(out.ink() - img.ink()).mean())
        self.assertGreater(change[0], change[1])
        self.assertGreater(change[1], change[2])

    def test05displacement_field(self):
        dy, dx = ai.displacement_field((40, 60), 20., 0.5, 0., 0.)
        self.assertEqual(dy.shape, (40, 60))
        self.assertAlmostEqual(np.abs(dx).max(), 60. / 20., delta=0.05)
        self.assertAlmostEqual(np.abs(dy).max(), 40. / 20., delta=0.05)
        # dx varies along the rows only, dy along the columns only
        np.testing.assert_array_equal(dx[:, 0], dx[:, 7])
        np.testing.assert_array_equal(dy[0, :], dy[9, :])

    def test06min_period(self):
        rng = np.random.default_rng(0)
        v = ParameterVector(Kind.DUPLICATOR, (50., 50., 0., 0., 0., 1.))
        amplitude, period, px, py = ai.draw_deformation(v, rng)
        self.assertEqual(amplitude, 50.)
        self.assertEqual(period, ai.MIN_PERIOD)

    def test07wrong_kind(self):
        with self.assertRaises(err.InvalidParameterVector):
            ai.sinusoidal_deform(writer_images()[0], ParameterVector(Kind.GAUSSIAN, (0.2, 0.4)),
                                 np.random.default_rng(0))


class Test01duplicate(ut.TestCase):

    def test00count_and_variety(self):
        img = writer_images()[0]
        dups = ai.duplicate(img, ai.DuplicatorConfig(), 22, np.random.default_rng(0))
        self.assertEqual(len(dups), 22)
        self.assertEqual(len({d.pixels.tobytes() for d in dups}), 22)
        self.assertEqual(len(ai.duplicate(img, ai.DuplicatorConfig(), 1, np.random.default_rng(0))), 1)

    def test01bad_count(self):
        with self.assertRaises(err.InvalidArgument):
            ai.duplicate(writer_images()[0], ai.DuplicatorConfig(), 0, np.random.default_rng(0))

    def test02config(self):
        c = ai.DuplicatorConfig()
        self.assertEqual(c.variability.values, (5., 30., 0.5, 1., 0., 1.))
        lines = c.params_text().splitlines()
        self.assertEqual(len(lines), 30)
        self.assertEqual(lines[0], 'alpha_A_min=5.0')
        self.assertIn('psi=0.8', lines)
        c2 = c.with_variability((60., 70., 0.3, 0.4, 0.1, 0.2))
        self.assertEqual(c2.variability['alpha_A_min'], 60.)
        self.assertEqual(c2.passthrough, c.passthrough)
        with self.assertRaises(err.InvalidArgument):
            ai.DuplicatorConfig(passthrough={'not_a_parameter': 1.})
        with self.assertRaises(err.InvalidParameterVector):
            ai.DuplicatorConfig(ParameterVector(Kind.GAUSSIAN, (0.2, 0.4)))


class Test02external(ut.TestCase):

    def test00success(self):
        img = writer_images()[0]
        with tempfile.TemporaryDirectory() as d:
            exe = write_script(d, 'dup.sh', COPYING_DUPLICATOR)
            c = ai.DuplicatorConfig(executable=exe)
            dups = ai.duplicate(img, c, 3, np.random.default_rng(0))
        self.assertEqual(len(dups), 3)
        for dup in dups:
            self.assertEqual(dup, img)

    def test01failure_carries_the_diagnostic(self):
        img = writer_images()[0]
        with tempfile.TemporaryDirectory() as d:
            exe = write_script(d, 'fail.sh', "echo 'cannot open model' >&2\nexit 3\n")
            c = ai.DuplicatorConfig(executable=exe)
            with self.assertRaises(err.AdapterFailed) as cm:
                ai.duplicate(img, c, 2, np.random.default_rng(0))
        msg = str(cm.exception)
        self.assertIn('exit status 3', msg)
        self.assertIn('cannot open model', msg)

    def test02wrong_output_count(self):
        img = writer_images()[0]
        with tempfile.TemporaryDirectory() as d:
            exe = write_script(d, 'lazy.sh', "exit 0\n")
            c = ai.DuplicatorConfig(executable=exe)
            with self.assertRaises(err.AdapterFailed) as cm:
                ai.duplicate(img, c, 2, np.random.default_rng(0))
        self.assertIn('expected 2 images, found 0', str(cm.exception))

    def test03missing_executable(self):
        c = ai.DuplicatorConfig(executable='/nonexistent/duplicator')
        with self.assertRaises(err.AdapterFailed):
            ai.duplicate(writer_images()[0], c, 1, np.random.default_rng(0))


class Test03eval(ut.TestCase):

    def test00range(self):
        gen = writer_images(5, 3)
        f = ai.eval_params_image(ParameterVector(Kind.DUPLICATOR, (60., 80., 0.5, 1., 0., 1.)),
                                 gen, 1, features.extract, np.random.default_rng(0), synthetic.CANVAS)
        self.assertGreaterEqual(f, 0.)
        self.assertLessEqual(f, 1.)

    def test01identity_duplicates(self):
        gen = writer_images(5, 3)
        f = ai.eval_params_image(ParameterVector(Kind.DUPLICATOR, (1e9, 1e9, 0.5, 1., 0., 1.)),
                                 gen, 1, features.extract, np.random.default_rng(0), synthetic.CANVAS)
        self.assertAlmostEqual(f, 1. / 3., places=9)

    def test02needs_two_images(self):
        with self.assertRaises(err.InsufficientSamples):
            ai.eval_params_image((60., 80., 0.5, 1., 0., 1.), writer_images(5, 3)[:1], 1,
                                 features.extract, np.random.default_rng(0), synthetic.CANVAS)


# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
# -----------------------------------------------------------------------------
if __name__ == '__main__':
    ut.main()
