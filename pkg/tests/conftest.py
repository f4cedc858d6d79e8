from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import pytest

FIXTURE_DIR = Path(str(resources.files("chainardl").joinpath("data", "fixture")))
BUNDLED_CONFIG = Path(str(resources.files("chainardl").joinpath("data", "presets.yaml")))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def write_csv(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def bundled_run(tmp_path_factory):
    """The bundled presets on the bundled fixture, run once per session."""
    from chainardl.pipeline import load_config, run
    out = tmp_path_factory.mktemp("bundled_run")
    return run(load_config(BUNDLED_CONFIG, out))


def i2_workspace(root: Path) -> Path:
    """Config plus data where x2 is double-integrated and x1 is not."""
    from chainardl.frame import Frame, from_day, write_csv
    from chainardl.synth import DgpParams, generate
    f = generate(DgpParams("ardl_cointegrated", 600, 31, {"phi": [0.7], "beta": [[0.3]], "const": 1.0}))
    i2 = generate(DgpParams("double_integrated", 600, 32))["y"]
    write_csv(Frame(f.dates, {"y": f["y"], "x1": f["x1"], "x2": i2}), root / "data.csv")
    (root / "run.yaml").write_text(
        "sources:\n  - path: data.csv\n"
        f"start: {from_day(f.dates[0]).isoformat()}\nend: {from_day(f.dates[-1]).isoformat()}\n"
        "unit_root_det: const\n"
        "models:\n"
        "  - {id: A, dependent: y, endogenous: [x1], det: const}\n"
        "  - {id: B, dependent: y, endogenous: [x1, x2], det: const}\n"
        f"output: {root / 'out'}\n")
    return root / "run.yaml"
