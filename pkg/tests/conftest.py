import pytest

from spectrim.corpus import demo_fixture
from spectrim.project import load_project


@pytest.fixture
def demo(tmp_path):
    return demo_fixture(tmp_path / "demo")


@pytest.fixture
def demo_project(demo):
    return load_project(demo.project_dir)



def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
