#!/usr/bin/env python
#

import pathlib

import setuptools

from sprockets import dfr


def read_requirements(name):
    requirements = []
    for line in pathlib.Path('requires', name).read_text().split('\n'):
        if '#' in line:
            line = line[:line.index('#')]
        line = line.strip()
        if not line or line.startswith('-'):
            continue
        requirements.append(line)
    return requirements


setuptools.setup(
    name='sprockets.dfr',
    version=dfr.__version__,
    description='Digital delayed feedback reservoir time series classifier',
    long_description=pathlib.Path('README.rst').read_text(),
    author='AWeber Communications',
    author_email='api@aweber.com',
    install_requires=read_requirements('installation.txt'),
    license='BSD',
    packages=setuptools.find_namespace_packages(include=['sprockets.*']),
    package_data={'sprockets.dfr': ['presets/*.json']},
    entry_points={
        'console_scripts': ['dfr=sprockets.dfr.cli:main'],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Software Development :: Libraries :: Python Modules'],
    tests_require=read_requirements('testing.txt'),
    python_requires='>=3.7',
    zip_safe=False,
)
