from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # build without the compiled core; kernels.py falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("nosmc._kernels", ["src/nosmc/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
