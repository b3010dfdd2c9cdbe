import numpy as np
import pytest

from seqslam.dataset import Traverse


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "ERROR")):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid and getattr(rep, "when", "call") == "call":
                name = rep.nodeid.split("::")[-1].removeprefix("test_")
                lines.append((name, label))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"ACCEPTANCE {name}: {label}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_traverse(images, prefix="img"):
    ids = tuple(f"{prefix}_{i:04d}.pgm" for i in range(len(images)))
    return Traverse(images=tuple(np.asarray(im, dtype=np.float64) for im in images), ids=ids)


def random_images(rng, count, height, width, lo=0, hi=255):
    return [rng.uniform(lo, hi, size=(height, width)) for _ in range(count)]
