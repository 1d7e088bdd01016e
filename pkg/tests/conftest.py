import pytest


@pytest.fixture
def report(capsys):
    """Print one visible pass/fail line per acceptance criterion leg."""

    def _report(label: str, ok: bool, detail: str = "") -> bool:
        with capsys.disabled():
            line = f"ACCEPTANCE {label}: {'PASS' if ok else 'FAIL'}"
            if detail:
                line += f" - {detail}"
            print(line, flush=True)
        return ok

    return _report
