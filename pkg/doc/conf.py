# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.
#
# Full list of options:
# http://www.sphinx-doc.org/en/master/config

# -- Project information -----------------------------------------------------

project = 'sigvar'
copyright = '2026, the sigvar developers'
author = 'the sigvar developers'

version = '0.1'
release = '0.1'


# -- General configuration ---------------------------------------------------

extensions = []

source_suffix = '.rst'
master_doc = 'index'

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'


# -- Output ------------------------------------------------------------------

htmlhelp_basename = 'sigvardoc'

man_pages = [
    (master_doc, 'sigvar', 'sigvar Documentation',
     [author], 1)
]
