from setuptools import Extension, setup
from Cython.Build import cythonize
import numpy as np

ext_module = Extension(
    "tlpool._core",
    ["src/tlpool/_core.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3"],
)

setup(
    ext_modules=cythonize(ext_module, language_level=3),
)
