"""Smoke test for the hexsle_py extension.

Uses an installed module when available, otherwise the library built by
`cargo build -p hexsle-py --features extension-module`.
"""

import importlib.util
import json
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import hexsle_py

        return hexsle_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("libhexsle_py.so", "libhexsle_py.dylib", "hexsle_py.dll"):
            lib = ROOT / "target" / profile / name
            if lib.exists():
                suffix = ".pyd" if name.endswith(".dll") else ".so"
                dest = pathlib.Path(tempfile.mkdtemp()) / ("hexsle_py" + suffix)
                shutil.copy(lib, dest)
                spec = importlib.util.spec_from_file_location("hexsle_py", dest)
                module = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(module)
                return module
    sys.exit("hexsle_py not found; build it with cargo build -p hexsle-py --features extension-module")


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    h = load()

    close(h.cardy_phi(0.5), 0.5, 1e-12)
    rect = h.MarkedDomain.rectangle(2.0, 1.0)
    close(rect.crossing_probability(), 0.1756468938006553, 1e-10)
    disc = h.MarkedDomain.half_disc()
    close(disc.hitting_cdf(0.5), 0.5, 1e-10)

    lattice = h.LatticeDomain.rhombus(16, 1 / 16)
    p, se = lattice.crossing(2000, seed=7, workers=1)
    assert abs(p - 0.5) < 5 * se + 0.02, (p, se)
    assert json.loads(lattice.to_json(7))["seed"] == 7

    hits = h.HittingLattice(disc, 0.05)
    xs = hits.hits(200, seed=3, workers=2)
    assert len(xs) == 200 and all(0.0 <= x <= 1.0 for x in xs)
    path, frac = hits.explore(3)
    assert json.loads(path)["seed"] == 3 and 0.0 <= frac <= 1.0

    chain = h.LoewnerChain.from_driving(1e-3, [0.0] * 101)
    t = chain.times()[-1]
    x, y = chain.trace()[-1]
    close(x, 0.0, 1e-12)
    close(y, 2 * math.sqrt(t), 1e-8)
    close(chain.capacity_coefficient(), 2 * chain.capacity_time(), 1e-9)
    walk = h.semiball_walk(0.2, 3, 11)
    assert len(walk["tau"]) == 3 and all(x <= 0.02 for x in walk["tau"])

    close(h.curve_distance([(0, 0), (1, 0)], [(0, 1), (1, 1)]), 1.0, 1e-12)
    close(h.hausdorff_points([(0, 0)], [(3, 4)]), 5.0, 1e-12)
    close(h.sphere_distance((0, 0), None), math.pi / 2, 1e-12)

    with tempfile.TemporaryDirectory() as out:
        config = "[crossing]\ndomain = { kind = \"rhombus\" }\nmesh = 0.0625\nsamples = 2000\n"
        passed, checks = h.run_experiment("crossing", out, config, seed=1, workers=1)
        assert (pathlib.Path(out) / "manifest.json").exists()
        print("crossing checks:", checks)

    print("smoke test ok")


if __name__ == "__main__":
    main()
