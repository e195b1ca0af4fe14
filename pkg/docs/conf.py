import sprockets.dfr

project = 'sprockets.dfr'
copyright = 'AWeber Communications, Inc.'
version = sprockets.dfr.__version__
release = '.'.join(str(v) for v in sprockets.dfr.version_info[0:2])

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.viewcode'
]

master_doc = 'index'
html_theme_options = {
    'github_user': 'sprockets',
    'github_repo': 'sprockets.dfr',
    'description': 'Delayed feedback reservoir classifier',
    'github_banner': True,
}

intersphinx_mapping = {
    'python': ('http://docs.python.org/3/', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'sklearn': ('https://scikit-learn.org/stable/', None),
    'tornado': ('http://tornadoweb.org/en/latest/', None),
}
