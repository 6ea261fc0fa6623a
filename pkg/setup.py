from setuptools import Extension, setup
from Cython.Build import cythonize
import numpy as np

# No -ffast-math: the kernels rely on Kahan compensation and IEEE semantics.
ext = Extension(
    "zetalab._kernels",
    ["src/zetalab/_kernels.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3"],
)

setup(
    ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}),
)
