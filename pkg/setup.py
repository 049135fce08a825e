"""Build script: compiles the optional kernel extension when Cython is present.

Without Cython the install still succeeds; the package then runs on the
pure-Python kernel twin selected at import time.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "matleg._ckern",
                ["src/matleg/_ckern.pyx"],
                # -ffp-contract=off keeps results bit-identical to the
                # pure-Python twin (no FMA contraction).
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=extensions)
