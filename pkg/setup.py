#!/usr/bin/env python

from setuptools import setup

setup(name='spectral-models',
      version='0.1.0',
      description='Spectral sequences, S-model structures and adjoint bicomplexes over exact fields',
      author='Stitch',
      url='http://singer.io',
      classifiers=['Programming Language :: Python :: 3 :: Only'],
      install_requires=[
          'singer-python==6.0.0',
          'pendulum==1.2.0',
          'jsonschema==2.6.0',
          'joblib==1.4.2',
      ],
      extras_require={
          'dev': [
              'ipdb',
          ],
          'test': [
              'hypothesis==6.100.0',
          ]
      },
      entry_points='''
          [console_scripts]
          spectral-models=spectral_models:main
      ''',
      packages=['spectral_models'],
      package_data = {
          'spectral_models': [
              "schemas/*.json",
              "fixtures/*.json",
          ]
      },
      include_package_data=True,
)
