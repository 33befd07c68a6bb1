#!/usr/bin/env python3
from setuptools import setup, find_packages


setup(
    name='deeprff',
    version=__import__('deeprff').__version__,
    description='deep residual random Fourier feature networks',
    long_description='',
    license='ISC',
    keywords=[
        'Random Fourier Features', 'Residual Networks', 'Metropolis',
        'Adam', 'Function Approximation',
    ],
    packages=find_packages(),
    package_data={'deeprff': ['data/*.json']},
    classifiers=[
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: ISC License (ISCL)',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Development Status :: 3 - Alpha',
    ],
    entry_points={
        'console_scripts': [
            'deeprff = deeprff.main:main',
        ],
        'deeprff.plugins': [
            'core = deeprff.core',
            'experiments = deeprff.experiments',
        ],
    },
    python_requires='>=3.10',
    install_requires=['numpy', 'scipy', 'ansicolors'],
    extras_require={'test': ['pytest', 'mock']},
)
