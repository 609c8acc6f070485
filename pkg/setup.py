"""Build script: compiles the optional reachability extension.

The extension is a pure speedup; if Cython or a C compiler is missing the
install falls back to the Python kernels transparently. Set
CLAIMTRACE_SKIP_EXT=1 to force a pure-Python install.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CLAIMTRACE_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "claimtrace.kernels._reach_cy",
                    ["src/claimtrace/kernels/_reach_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
