"""Shared fixtures and the acceptance criterion reporter."""

from floorbeam import AlignmentConstraint, Axis, Circuit, Module, Net, validate_circuit

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(n: int, passed: bool, detail: str = "") -> None:
    suffix = f"  ({detail})" if detail else ""
    line = f"acceptance criterion {n}: {'PASS' if passed else 'FAIL'}{suffix}"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def make_circuit(dims, nets=(), alignments=(), target_ar=None) -> Circuit:
    """Build a validated circuit from (w, h) pairs and member id tuples."""
    c = Circuit(
        modules=tuple(Module(i, w, h) for i, (w, h) in enumerate(dims)),
        nets=tuple(Net(i, tuple(members)) for i, members in enumerate(nets)),
        alignments=tuple(
            AlignmentConstraint(a, b, Axis(ax)) for a, b, ax in alignments
        ),
        target_ar=target_ar,
    )
    return validate_circuit(c)
