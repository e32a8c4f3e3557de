# -*- coding: utf-8 -*-

import os

from setuptools import find_packages
from setuptools import setup


def read(*rnames):
    with open(os.path.join(os.path.dirname(__file__), *rnames)) as fh:
        return fh.read()


setup(
    name='flashbench',
    python_requires='>=3.7',
    packages=find_packages(exclude=['examples', 'flashbench.tests']),
    package_dir={'': '.'},
    package_data={
        'flashbench': [
            'catalog/*.yaml',
            'templates/*tmpl',
        ],
    },
    dependency_links=[],
    use_scm_version=True,
    install_requires=[
        'importlib_metadata',
        'jinja2',
        'networkx',
        'numpy>=1.17',
        'pyyaml',
        'scipy',
        'statsmodels',
    ],
    extras_require={
        'tests': ['pytest', 'hypothesis'],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Education',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Utilities',
    ],
    author='flashbench maintainers',
    description='Simulate and exactly verify the two-detector red/green '
    'correlation experiment and its local hidden-variable models.',
    long_description=read('README.rst'),
    long_description_content_type='text/x-rst',
    license='MIT',
    keywords='bell inequality instruction sets hidden variables simulation',
    entry_points={'console_scripts': ['flashbench = flashbench.cli:main']},
)
