"""Build script. The compiled elimination kernel is optional: when Cython or a
C compiler is unavailable the package installs anyway and falls back to the
pure-Python kernel at import time."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LIEFORGE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("lieforge._ffelim", ["src/lieforge/_ffelim.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
