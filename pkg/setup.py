"""Build the optional Cython kernels.

The package runs without them (``regimekit._fallback`` is used instead), so a
missing compiler or Cython install downgrades to the pure-Python path rather
than failing the install.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("REGIMEKIT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "regimekit._kernels",
                    ["src/regimekit/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
