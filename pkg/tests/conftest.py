import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, seconds, detail in results:
        line = f"{status:<4}  {name}  ({seconds:.2f} s)"
        terminalreporter.write_line(line + (f"  {detail}" if detail else ""))
