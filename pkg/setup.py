import numpy as np
from setuptools import Extension, setup

# The compiled sweep kernel is optional: without Cython (or a working
# compiler) the package installs pure and sepdisc.kernels falls back to
# the numpy implementation at import time.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "sepdisc.kernels._core",
                ["src/sepdisc/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
