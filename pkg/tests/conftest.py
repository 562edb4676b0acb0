import json
import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from relcheck import cli, smt  # noqa: E402
from relcheck.synth import VerifyConfig  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

requires_z3 = pytest.mark.skipif(shutil.which(smt.DEFAULT_CMD[0]) is None,
                                 reason="z3 executable not on PATH")


def entries():
    return [(d.name, json.loads((d / "meta.json").read_text())) for d in cli.corpus_entries(CORPUS)]


class VerdictStore:
    """Verification results computed once per session."""

    def __init__(self):
        self._done = {}

    def get(self, name: str, variant: str = "original"):
        key = (name, variant)
        if key not in self._done:
            d = CORPUS / name
            meta = json.loads((d / "meta.json").read_text())
            new = d / ("new.ir" if variant == "original" else meta["mutant"])
            cfg = VerifyConfig(smt.SolverConfig())
            self._done[key] = cli.verify(str(d / "old.ir"), str(new), meta["mode"], cfg)
        return self._done[key]


@pytest.fixture(scope="session")
def verdicts():
    return VerdictStore()


@pytest.fixture(scope="session")
def cdx_programs():
    return cli.load(str(CORPUS / "cdx" / "old.ir")), cli.load(str(CORPUS / "cdx" / "new.ir"))
