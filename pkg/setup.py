"""Build script for the optional compiled nearest-codeword kernel.

The package is fully functional without the extension (a vectorized numpy
fallback is selected at import time), so a failing compile must not break
the install.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to the pure-Python install on compiler errors."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler / toolchain
            print(f"WARNING: compiled kernel skipped ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: building {ext.name} failed ({exc}); using numpy fallback")


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "cfcsi._kernels._nn",
        ["src/cfcsi/_kernels/_nn.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
