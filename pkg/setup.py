"""Build script: compiles the stream kernel extension when Cython and a C
toolchain are available.  The package works without it (pure-numpy fallback
is selected at import), so extension build failures are non-fatal.
"""

import sys

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "cliquedec._stream",
                sources=["src/cliquedec/_stream.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001 - any build-env gap falls back to pure python
    print(f"cliquedec: building without compiled kernel ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
