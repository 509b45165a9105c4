"""Collects one verdict line per acceptance criterion for the run summary."""

RESULTS: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> bool:
    RESULTS[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[number])
    return ok
