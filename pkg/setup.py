"""Builds the optional compiled kernels.

The package works without them: pose6d.kernels falls back to the pure
numpy/python implementations when pose6d._ckernels is absent.
"""

import numpy
from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class optional_build_ext(build_ext):
    """Skip the compiled kernels instead of failing the whole install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); "
                  "falling back to pure python")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping {ext.name} ({exc})")


if cythonize is not None:
    extensions = cythonize(
        [Extension(
            "pose6d._ckernels",
            sources=["src/pose6d/_ckernels.pyx"],
            include_dirs=[numpy.get_include()],
            # keep results bit-identical to the pure-python fallback:
            # no fused multiply-add contraction
            extra_compile_args=["-ffp-contract=off"],
        )],
        compiler_directives={"language_level": "3"},
    )
else:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
