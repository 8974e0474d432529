"""Build script: compiles the antenna cascade kernel when a C toolchain exists.

The package works without the extension (a NumPy/SciPy fallback is selected
at import time), so a failed compile only costs speed.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "gaussianlink.antenna._kernel",
                ["src/gaussianlink/antenna/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    sys.stderr.write(f"gaussianlink: building without compiled kernel ({exc})\n")

setup(ext_modules=ext_modules)
