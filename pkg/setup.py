"""Build script: the Cython kernels are optional.

If Cython or a C compiler is missing the package still installs and the
pure-Python kernels are used.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("REDWALK_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension(
                "redwalk._kernels",
                ["src/redwalk/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                # keep a*b + c unfused and cos/sin as separate libm calls (not a merged
                # sincos) so results match the Python kernels bit for bit
                extra_compile_args=["-O2", "-ffp-contract=off", "-fno-builtin"],
            )],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
