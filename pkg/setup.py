"""Build the optional compiled planner kernel.

If Cython or a C compiler is unavailable the package installs without it
and falls back to the numpy kernel at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("NIBROUTE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "nibroute._dpcore",
                    ["src/nibroute/_dpcore.pyx"],
                    extra_compile_args=["-O3", "-fopenmp"],
                    extra_link_args=["-fopenmp"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
