"""Smoke test for the Python extension.

Builds the extension with cargo (unless REESKIT_SO points at a built
library), loads it as `reeskit`, and exercises the main entry points.
"""

import importlib.util
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_extension():
    so = os.environ.get("REESKIT_SO")
    if so is None:
        subprocess.run(
            ["cargo", "build", "--release", "-p", "reeskit-py", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
        so = ROOT / "target" / "release" / "libreeskit_py.so"
    tmp = Path(tempfile.mkdtemp())
    target = tmp / "reeskit.so"
    shutil.copy(so, target)
    spec = importlib.util.spec_from_file_location("reeskit", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    rk = load_extension()

    assert rk.normalize_poly(["x", "y"], "(x + y)^2 - y^2") == "x^2 + 2*x*y"

    ideal = rk.Ideal(["x", "y", "z"], ["x*y", "y*z"])
    assert ideal.contains("x*y*z")
    assert not ideal.contains("x")
    assert ideal.height() == 1
    assert ideal.saturate(rk.Ideal(["x", "y", "z"], ["y"])).equals(rk.Ideal(["x", "y", "z"], ["x", "z"]))

    f1 = rk.fixture("F1")
    report = f1.check()
    assert report.all_pass, report.checks
    ctx = f1.rees_context()
    assert ctx.vars == ["x", "y", "z", "T1", "T2", "T3", "T4"]
    assert len(ctx.ells) == 3
    assert ctx.closed_form().equals(ctx.oracle())
    cert = ctx.verify()
    assert cert.verdict and len(cert.identities) == 7
    fiber, spread = ctx.special_fiber()
    assert spread == 3
    assert fiber.equals(rk.Ideal(["T1", "T2", "T3", "T4"], ["T1*T2 - T1*T3 - T2*T3"]))

    bad = rk.fixture("example_3_9").check()
    assert bad.first_failure == "rank_one"
    forced = rk.fixture("example_3_9").rees_context(force=True)
    assert not forced.closed_form_candidate().equals(forced.oracle())
    try:
        rk.fixture("example_3_9").rees_context()
        raise AssertionError("uncertified input accepted")
    except RuntimeError:
        pass

    try:
        rk.Presentation(["x", "y"], [["x"], ["y"]], 1)
        raise AssertionError("two-variable ring accepted")
    except ValueError:
        pass

    for name, passed in rk.run_fixture("F2"):
        assert passed, name

    print("python smoke test: ok")


if __name__ == "__main__":
    sys.exit(main())
