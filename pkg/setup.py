import sys

from setuptools import Extension, setup

# The compiled kernels are optional: if Cython (or a C compiler) is missing,
# the package falls back to the pure-Python implementations in
# defzeta.kernels.pybackend, selected at import time.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "defzeta.kernels._ckernels",
                ["src/defzeta/kernels/_ckernels.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    sys.stderr.write(f"defzeta: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
