"""Build the optional Cython Gibbs kernels.

If Cython or a C compiler is missing, the package installs without the
extension and the pure-Python kernels are used at import time.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "digraphon._kernels._sweep_cy",
                ["src/digraphon/_kernels/_sweep_cy.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
