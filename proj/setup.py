import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "fragsel._fragsel",
    sources=sorted(glob.glob("src/*.cpp")) + ["python/bindings.cpp"],
    include_dirs=["include", "vendor", "src"],
    cxx_std=20,
    extra_compile_args=["-pthread"],
    extra_link_args=["-pthread"],
)

setup(
    packages=["fragsel"],
    package_dir={"fragsel": "python/fragsel"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
