from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "symheun._kernels",
        ["src/symheun/_kernels.pyx"],
        extra_compile_args=["-O3"],
        optional=True,  # no compiler: the pure-Python kernels take over
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
