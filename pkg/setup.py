"""Build hook for the optional compiled kernel extension.

The package works without the extension (a numpy implementation is selected
at import time), so a missing compiler or Cython only costs speed.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "risloc._kernels",
                ["src/risloc/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"risloc: skipping compiled kernels ({exc}); the numpy fallback will be used")

setup(ext_modules=ext_modules)
