from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-python fallback is selected at import time, so a missing Cython
    # only costs speed, not functionality.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "oiasim._kernels",
                ["src/oiasim/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
