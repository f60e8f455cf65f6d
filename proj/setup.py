# Extension build only; package metadata lives in pyproject.toml.  The
# extension compiles the core sources directly (the CLI translation unit is
# not part of the python surface).

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "wfsim._core",
    sources=[
        "src/qstate.cpp",
        "src/agents.cpp",
        "src/protocol.cpp",
        "src/correlations.cpp",
        "src/chsh.cpp",
        "src/protofile.cpp",
        "python/src/bindings.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
