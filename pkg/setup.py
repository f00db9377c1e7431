import os

import numpy as np
from setuptools import Extension, setup

extensions = []
if not os.environ.get("RANKRANGE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:  # sdist without Cython: pure-Python fallback only
        cythonize = None
    if cythonize is not None:
        extensions = cythonize(
            [
                Extension(
                    "rankrange._kernels",
                    ["src/rankrange/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=extensions)
