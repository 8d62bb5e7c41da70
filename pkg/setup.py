"""Build the optional Cython kernels; the package falls back to numpy if they fail to compile."""
import os
import sys

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: Cython kernels not built ({exc}); using the numpy fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc}); using the numpy fallback", file=sys.stderr)


def extensions():
    if os.environ.get("AIRAN_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "airan._kernels",
        ["src/airan/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # bit-identical results with the numpy fallback depend on no FMA contraction
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
