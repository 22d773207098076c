import sys

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    import numpy as np

    # fp-contract off: no fused multiply-add, keeps the orbit bit-identical
    # to the pure-Python kernels
    extra = [] if sys.platform == "win32" else ["-O2", "-ffp-contract=off"]
    ext_modules = cythonize(
        [
            Extension(
                "chaoscipher._ckernels",
                ["src/chaoscipher/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=extra,
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
