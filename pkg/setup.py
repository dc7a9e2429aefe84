"""Build script: compiles the accelerated kernels when Cython is available.

The package works without the extension; `floorbeam._kernels` falls back to
the numpy reference implementation at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "floorbeam._kernels._accel",
                ["src/floorbeam/_kernels/_accel.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # keep strict IEEE mul/add so results track the numpy reference
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
