"""Basic tests for the matterwave package.

This test file ensures that all Python modules in the package can be
compiled without syntax errors, without importing numerical dependencies.
If a module fails to compile, the test fails and displays the error.
"""
import pathlib
import py_compile


def test_compile_all_sources() -> None:
    """Compile all Python files under the package root to check syntax."""
    root = pathlib.Path(__file__).resolve().parents[1] / "matterwave"
    for path in root.rglob("*.py"):
        try:
            py_compile.compile(path, doraise=True)
        except py_compile.PyCompileError as exc:
            raise AssertionError(f"Failed to compile {path}: {exc}")


def test_presets_are_packaged() -> None:
    data = pathlib.Path(__file__).resolve().parents[1] / "matterwave" / "data"
    for mode in ("single", "double-coherent", "double-decoherent"):
        assert (data / f"{mode}.cfg").is_file()
