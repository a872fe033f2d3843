import os
import sys

from setuptools import setup


def readme():
    with open('README.md') as f:
        return f.read()


try:
    sys.path.insert(0, os.path.abspath('doc'))
    from version_from_git import version_number_from_git

    version = version_number_from_git()
    with open("RELEASE-VERSION", "w") as f:
        f.write(version)
except (ImportError, IndexError, ValueError):
    with open('RELEASE-VERSION', 'r') as f:
        version = f.read().strip()

setup(name='fluxtransfer',
      description='Quantum state transfer between two flux qubits through a shared resonator',
      version=version,
      long_description=readme(),
      long_description_content_type="text/markdown",
      license='AGPLv3',
      packages=['fluxtransfer'],
      install_requires=['sympy>=1.1', 'numpy', 'scipy', 'appdirs', 'joblib', 'pandas'],
      classifiers=[
          'Development Status :: 4 - Beta',
          'Topic :: Scientific/Engineering :: Physics',
          'Intended Audience :: Science/Research',
          'License :: OSI Approved :: GNU Affero General Public License v3 or later (AGPLv3+)',
      ],
      entry_points={
          'console_scripts': ['fluxtransfer = fluxtransfer.cli:main'],
      },
      extras_require={
          'doc': ['sphinx', 'sphinx_rtd_theme', 'sphinx_autodoc_typehints'],
      },
      tests_require=['pytest', 'pytest-cov', 'flake8'],
      python_requires=">=3.7",
      )
