"""Build script: compiles the optional fast kernels.

The package works without the extension (frgc._backend falls back to the
pure-Python loops), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("frgc._kernels", ["src/frgc/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
