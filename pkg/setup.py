"""Build script for the optional compiled numerics core.

The extension is marked optional: if Cython or a C compiler is missing the
package installs with the pure-Python kernels only.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "h2p.numerics._ckernels",
                ["src/h2p/numerics/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
