"""Build script: compiles the optional kernel extension when Cython is present.

The package is fully functional without the extension (pure-Python kernels
are selected at import time); building it just makes the hot loops fast.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        [
            Extension(
                "twinsim.kernels._core",
                ["src/twinsim/kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: no FMA contraction, so the compiled
                # kernels are bit-identical to the pure-Python fallback.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
