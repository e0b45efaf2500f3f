import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # the package falls back to numpy kernels at import time
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "graphmark._kernels",
                ["src/graphmark/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
