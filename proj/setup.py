import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = sorted(glob.glob("src/*.cpp")) + ["src/python/bindings.cpp"]

ext = Pybind11Extension(
    "moyal_scatter._core",
    sources,
    include_dirs=["include", "vendor", "/usr/include/eigen3"],
    libraries=["fftw3", "openblas"],
    define_macros=[("EIGEN_USE_BLAS", None)],
    cxx_std=20,
    extra_compile_args=["-O2"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
