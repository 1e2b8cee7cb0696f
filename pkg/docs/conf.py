# -*- coding: utf-8 -*-
#
# zipgrid documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

from zipgrid.version import version as _version  # noqa: E402

# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.mathjax',
              'sphinx.ext.napoleon', 'sphinx.ext.intersphinx',
              'sphinx_automodapi.automodapi',
              'sphinx_automodapi.smart_resolver',
              'sphinx_gallery.gen_gallery']

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/reference/', None),
    'astropy': ('http://docs.astropy.org/en/stable/', None),
    'matplotlib': ('https://matplotlib.org/stable/', None)}

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'zipgrid'
copyright = '2019, zipgrid developers'
author = 'zipgrid developers'

version = '.'.join(_version.split('.')[:2])
release = _version

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = False

# This is added to the end of RST files - a good place to put substitutions to
# be used globally.
default_role = 'obj'

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = 'zipgriddoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'zipgrid.tex', 'zipgrid Documentation',
     'zipgrid developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'zipgrid', 'zipgrid Documentation',
     [author], 1)
]

sphinx_gallery_conf = {
    # path to your examples scripts
    'examples_dirs': '../zipgrid/examples',
    # path where to save gallery generated examples
    'backreferences_dir': 'gen_modules/backreferences',
    'gallery_dirs': 'auto_examples',
}
