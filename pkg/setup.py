import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SPDE_PERTURB_NO_EXT", "0") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "spde_perturb._step_kernels",
                    ["src/spde_perturb/_step_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: install pure-Python only, the package falls
        # back to the numpy kernels at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
