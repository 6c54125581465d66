"""Collects one verdict line per acceptance criterion."""
RESULTS = []


def record(key, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok
