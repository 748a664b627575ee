import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "classabs._split_cy",
                ["src/classabs/_split_cy.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
else:
    # pure-python fallback kernel is used when the extension is unavailable
    ext_modules = []

setup(ext_modules=ext_modules)
