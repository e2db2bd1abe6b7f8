"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a Python fallback is
selected at import time), so a failed compile downgrades to a warning instead
of aborting the install.  Set CARBONFLOW_NO_EXT=1 to skip the build entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernels ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "the pure-Python kernels will be used", file=sys.stderr)


ext_modules = []
if os.environ.get("CARBONFLOW_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "carbonflow._kernels._speedups",
                    ["src/carbonflow/_kernels/_speedups.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        print("warning: Cython not available; building without compiled kernels",
              file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
