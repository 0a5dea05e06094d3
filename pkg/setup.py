import os
import sys

from setuptools import Extension, setup

# Set WEAKMEAS_NO_EXT=1 to install the pure-Python kernel only.
ext_modules = []
if not os.environ.get("WEAKMEAS_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "weakmeas._kernel",
                    ["src/weakmeas/_kernel.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:
        print(f"weakmeas: building without compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
