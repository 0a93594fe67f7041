"""Build script for the optional compiled kernels.

The package is fully functional without the extension: diagcount.kernels
falls back to the numpy implementation when diagcount._ckernels is not
importable.  The extension is marked optional so a missing C++ toolchain
degrades to the fallback instead of failing the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext = Extension(
        "diagcount._ckernels",
        sources=["src/diagcount/_ckernels.pyx"],
        language="c++",
        extra_compile_args=["-O3", "-std=c++11"],
    )
    ext.optional = True
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
