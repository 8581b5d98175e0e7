"""Build script for the optional compiled matching kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time); building it just makes corpus-scale
matching much faster.  To compile in place:

    python setup.py build_ext --inplace
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        "src/stereomine/matcher/_speedups.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
