import os

from setuptools import Extension, setup

# the compiled kernel backend is optional: the package falls back to the
# pure-Python twin at import time, so a failed build must not block install
ext = Extension(
    "colorcs._poly_cy",
    ["src/colorcs/_poly_cy.pyx"],
    extra_compile_args=["-O3"],
    optional=True,
)

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    cfile = "src/colorcs/_poly_cy.c"
    if os.path.exists(cfile):
        ext.sources = [cfile]
        ext_modules = [ext]
    else:
        ext_modules = []

setup(ext_modules=ext_modules)
