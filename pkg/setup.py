import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "satjam._kernels",
        ["src/satjam/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

# The pure-Python kernels are a complete fallback, so a failed compile is not fatal.
optional = os.environ.get("SATJAM_REQUIRE_EXT", "") in ("", "0")
for ext in extensions:
    ext.optional = optional

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
