import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PRIMBOUNDS_PURE"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "primbounds._ckernel",
                    ["src/primbounds/_ckernel.pyx"],
                    language="c++",
                    extra_compile_args=["-O3", "-std=c++17"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
