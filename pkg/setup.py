"""Build script: compiles the optional Gibbs-sampling extension.

The extension is a performance twin of anflo._gibbs_py.  If Cython (or a C
compiler) is unavailable the install still succeeds and the package falls
back to the pure-Python kernel at import time.

The sampler must produce bit-identical results in both backends, so the
extension is deliberately compiled without value-changing float options:
no -ffast-math, no fused multiply-add contraction.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "anflo._gibbs",
                ["src/anflo/_gibbs.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
