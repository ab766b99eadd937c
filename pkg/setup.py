from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-python fallback kernels are selected at import when the
    # extension is missing, so the package still works without Cython.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "biasfuse._kernels",
                ["src/biasfuse/_kernels.pyx"],
                # No -ffast-math: the compiled kernels must keep IEEE
                # semantics so their sums match the pure-python backend
                # bit for bit.
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
