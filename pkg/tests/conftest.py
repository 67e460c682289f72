import pytest

from conflict_preorder import fixtures

# single-letter spelling used by the regular-expression checks
LETTER = {"alpha": "a", "beta": "b", "gamma": "c", "omega": "w"}


def spell(trace) -> str:
    return "".join(LETTER[e] for e in trace)


@pytest.fixture(scope="session")
def fx():
    return fixtures.load_all()


@pytest.fixture(params=["python", "cython"])
def backend(request):
    from conflict_preorder import kernels

    if request.param not in kernels.BACKENDS:
        pytest.skip("compiled kernels not built")
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
