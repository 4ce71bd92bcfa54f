"""Builds the optional compiled mining kernels.

Without Cython or a C compiler the package installs pure Python and
``unitlint.deduction.kernels`` falls back automatically.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure
            self.warn(f"compiled kernels not built ({exc}); using the pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self.warn(f"failed to build {ext.name} ({exc}); using the pure-Python fallback")


try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("unitlint.deduction._kernels", ["src/unitlint/deduction/_kernels.pyx"])],
        compiler_directives={"language_level": 3},
        quiet=True,
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
