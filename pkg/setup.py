from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("catmc._kernels._core", ["src/catmc/_kernels/_core.pyx"])],
        language_level=3,
    )
except ImportError:
    # No Cython: install pure-Python only, the kernel fallback is used.
    ext_modules = []

setup(ext_modules=ext_modules)
