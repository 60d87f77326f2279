"""CMake-driven build of the _twinzyg extension for setuptools.

Use `pip install -e . --no-build-isolation`; the CMake configure step
needs pybind11 importable from the installing interpreter.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str) -> None:
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        out_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        out_path.parent.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DTWINZYG_PYTHON=ON",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_twinzyg"],
            check=True,
        )

        built = sorted((build_dir / "python").glob("_twinzyg.*.so")) or sorted(
            (build_dir / "python").glob("_twinzyg*.so")
        )
        if not built:
            raise RuntimeError("CMake did not produce the _twinzyg extension")
        shutil.copy2(built[0], out_path)


setup(
    ext_modules=[CMakeExtension("twinzyg._twinzyg")],
    cmdclass={"build_ext": CMakeBuild},
)
