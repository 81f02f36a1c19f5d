"""Build the optional Cython kernels.

The package works without them: ``arcbip.kernels`` falls back to the
pure-Python implementation when the extension cannot be imported.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ARCBIP_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("arcbip._kernels", ["src/arcbip/_kernels.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3",
                                 "boundscheck": False,
                                 "wraparound": False,
                                 "cdivision": True},
        )

setup(ext_modules=ext_modules)
