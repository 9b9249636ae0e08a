#!/usr/bin/env python3
#-*- encoding: utf-8 -*-

from setuptools import setup, find_packages

with open('README.md') as f:
    desc = f.read()

with open('requirements.txt') as f:
    install_requirements = f.read().splitlines()


setup(
    name='arborist',
    version='0.1.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={
        'arborist': ['data/*']
    },
    python_requires=">=3.9",
    install_requires=install_requirements,
    entry_points={
        'console_scripts': ['arborist=arborist.cli:main'],
    },
    long_description=desc,
    long_description_content_type="text/markdown",
    tests_require=[
        'pytest',
        'pytest-cov'
    ],
)
