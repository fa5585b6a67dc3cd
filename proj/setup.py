"""Builds the pybind11 extension through the project's CMake build."""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DSPECBENCH_BUILD_TESTS=OFF",
                "-DSPECBENCH_BUILD_CLI=OFF",
                "-DSPECBENCH_BUILD_PYTHON=ON",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_specbench"],
            check=True,
        )

        built = list((build_dir / "python" / "specbench").glob("_specbench*.so"))
        if not built:
            raise RuntimeError("cmake did not produce the _specbench module")
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[0], target)


setup(
    packages=["specbench"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("specbench._specbench")],
    cmdclass={"build_ext": CMakeBuild},
)
