"""Builds the optional compiled kernels; the package works without them."""

import os

from setuptools import Extension, setup

pyx = os.path.join("src", "jacstrata", "_kernels.pyx")
csrc = os.path.join("src", "jacstrata", "_kernels.c")

ext_modules = []
if not os.environ.get("JACSTRATA_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("jacstrata._kernels", [pyx], optional=True)],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
    except ImportError:
        if os.path.exists(csrc):
            ext_modules = [Extension("jacstrata._kernels", [csrc], optional=True)]

setup(ext_modules=ext_modules)
