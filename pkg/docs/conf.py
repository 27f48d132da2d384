# This file is automatically generated via sphinx-me
from sphinx_me import setup_conf; setup_conf(globals())
