import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled noise bit-identical to the numpy mirror.
flags = ["-O3", "-ffp-contract=off", "-fno-fast-math"]
if not os.environ.get("LPPLAB_PORTABLE"):
    flags.append("-march=native")

ext = Extension(
    "lpplab._kernels",
    ["src/lpplab/_kernels.pyx"],
    include_dirs=[np.get_include(), "src/lpplab"],
    extra_compile_args=flags,
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], compiler_directives={"language_level": 3}))
