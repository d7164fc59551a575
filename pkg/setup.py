"""Build script for the optional compiled kinematics core.

The extension is marked optional: if the C toolchain or Cython is
unavailable the install still succeeds and the pure-Python fallback in
linguomotor._kinematics_py is used at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "linguomotor._speedups",
                sources=["src/linguomotor/_speedups.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
