"""Build the compiled extension by driving the project's CMake tree.

The wheel and editable installs both go through build_ext below: it
configures CMake into the temporary build directory with tests switched
off, builds only the extension target, and copies the produced module to
wherever setuptools wants the extension for the current layout.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DLOCHS_TESTS=OFF",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(configure, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "-j"],
            check=True,
        )

        produced = list((build_dir / "python" / "lochs").glob("_core.*"))
        if not produced:
            raise RuntimeError("CMake did not produce the extension module")
        target = Path(self.get_ext_fullpath(ext.name)).resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(produced[0], target)


setup(
    ext_modules=[CMakeExtension("lochs._core")],
    cmdclass={"build_ext": CMakeBuild},
)
