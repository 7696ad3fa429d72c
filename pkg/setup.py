#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages
import os.path
import sys


sigvarversion_str = "0.1.0"


minpyversion = (3, 8)
if sys.version_info < minpyversion:
    # importlib.metadata arrived in 3.8
    sys.exit(f'sigvar requires at least Python {minpyversion}. Current version is {sys.version_info}. Sorry.')


def read(*rnames):
    with open(os.path.join(os.path.dirname(__file__), *rnames)) as f:
        return f.read()


def get_readme():
    # skip the badge section
    contents = read('README.rst')
    for s in ("\nsigvar\n======", "\nsigvar\r\n======"):
        i = contents.find(s)
        if i != -1:
            return contents[i:]
    raise Exception("malformed README")


def readreqs(*rnames):
    def _skipcomment(line):
        return line if (line and not line.startswith('--')
                        and not line.startswith('#')) else ""
    with open(os.path.join(os.path.dirname(__file__), *rnames)) as f:
        l = [_skipcomment(line.strip()) for line in f]
    return [x for x in l if x]


setup(name="sigvar",
      version=sigvarversion_str,
      description="Writer-variability parameter optimization for offline signature augmentation",
      long_description=get_readme() + "\n" + read('LICENSE.txt'),
      long_description_content_type="text/x-rst",
      license="License :: OSI Approved :: MIT License",
      classifiers=[
          "License :: OSI Approved :: MIT License",
          "Intended Audience :: Science/Research",
          "Development Status :: 3 - Alpha",
          "Programming Language :: Python :: 3.8",
          "Programming Language :: Python :: 3.9",
          "Programming Language :: Python :: 3.10",
          "Topic :: Scientific/Engineering :: Image Recognition",
          "Topic :: Scientific/Engineering :: Artificial Intelligence",
      ],
      keywords=["signature verification", "data augmentation", "particle swarm", "svm"],
      zip_safe=False,
      namespace_packages=['c4'],
      packages=find_packages('src'),
      package_dir={'': 'src'},
      package_data={'c4.sigvar': ['conf/*.yml', 'conf/params/*.json', 'doc/*.txt']},
      entry_points={'console_scripts': ['sigvar=c4.sigvar.main:sigvar_main'], },
      python_requires='>=3.8',
      install_requires=readreqs('requirements.txt'),
      extras_require={'test': readreqs('requirements_test.txt')},
      include_package_data=True,
)
