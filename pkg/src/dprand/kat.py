"""Known-answer test harness for the counter-mode DRBG.

Reads the standard response-file text format: `[Section]` headers with
`[Param = Value]` lines, then `COUNT = n` blocks of `Field = hexvalue`
pairs. Recognized fields drive the DRBG lifecycle in file order:

    EntropyInput        instantiate
    EntropyInputReseed  reseed
    EntropyInputPR      reseed immediately before the next generate
    AdditionalInput     one generate call (value may be empty)
    Key / V             assert the current internal state
    ReturnedBits        assert the output of the last generate

Only `[AES-256 no df]` sections are applicable to this implementation;
anything else is reported as skipped, never silently dropped.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .drbg import CtrDrbg, DrbgConfig

_APPLICABLE = "AES-256 no df"


@dataclass
class KatVector:
    source: str
    section: str
    params: dict[str, str]
    count: int
    steps: list[tuple[str, bytes]] = field(default_factory=list)

    @property
    def name(self) -> str:
        pr = self.params.get("PredictionResistance", "False")
        reseed = "reseed" if any(f == "EntropyInputReseed" for f, _ in self.steps) else "no-reseed"
        return f"{self.source} [{self.section}] pr={pr} {reseed} COUNT={self.count}"


@dataclass
class KatResult:
    vector: KatVector
    status: str  # "pass" | "fail" | "skip"
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


_SECTION_RE = re.compile(r"^\[([^=\]]+)\]$")
_PARAM_RE = re.compile(r"^\[([^=\]]+?)\s*=\s*(.*?)\]$")
_FIELD_RE = re.compile(r"^([A-Za-z]+)\s*=\s*([0-9a-fA-F]*)$")


def parse_response_text(text: str, source: str = "<text>") -> list[KatVector]:
    vectors: list[KatVector] = []
    section = ""
    params: dict[str, str] = {}
    current: KatVector | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("**"):
            continue
        m = _PARAM_RE.match(line)
        if m:
            params[m.group(1).strip()] = m.group(2).strip()
            continue
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            params = {}
            current = None
            continue
        m = _FIELD_RE.match(line)
        if not m:
            raise ValueError(f"{source}: unparseable line: {raw!r}")
        name, hexval = m.group(1), m.group(2)
        if name == "COUNT":
            current = KatVector(source, section, dict(params), int(hexval, 10))
            vectors.append(current)
            continue
        if current is None:
            raise ValueError(f"{source}: field {name!r} before any COUNT")
        current.steps.append((name, bytes.fromhex(hexval)))
    return vectors


def run_vector(vec: KatVector) -> KatResult:
    if vec.section != _APPLICABLE:
        return KatResult(vec, "skip", f"section {vec.section!r} not applicable")
    pr = vec.params.get("PredictionResistance", "False") == "True"
    try:
        ret_len = int(vec.params["ReturnedBitsLen"]) // 8
    except KeyError:
        return KatResult(vec, "fail", "section lacks ReturnedBitsLen")
    config = DrbgConfig(prediction_resistance=pr)

    drbg: CtrDrbg | None = None
    last_output: bytes | None = None
    compared = False
    try:
        for fieldname, value in vec.steps:
            if fieldname == "EntropyInput":
                drbg = CtrDrbg(value, config)
            elif fieldname in ("Nonce", "PersonalizationString"):
                if value:
                    return KatResult(vec, "skip", f"non-empty {fieldname} not applicable to no-df seeding")
            elif fieldname == "EntropyInputReseed":
                drbg.reseed(value)
            elif fieldname == "AdditionalInputReseed":
                if value:
                    return KatResult(vec, "skip", "reseed-time additional input not applicable")
            elif fieldname == "EntropyInputPR":
                drbg.reseed(value)
                last_output = drbg.generate(ret_len)
            elif fieldname == "AdditionalInput":
                if pr:
                    if value:
                        return KatResult(vec, "skip", "PR vectors with additional input not applicable")
                    continue  # the paired EntropyInputPR line performs the generate
                last_output = drbg.generate(ret_len, value or None)
            elif fieldname == "Key":
                if drbg.key != value:
                    return KatResult(vec, "fail",
                                     f"Key mismatch: got {drbg.key.hex()}, want {value.hex()}")
            elif fieldname == "V":
                if drbg.v != value:
                    return KatResult(vec, "fail",
                                     f"V mismatch: got {drbg.v.hex()}, want {value.hex()}")
            elif fieldname == "ReturnedBits":
                compared = True
                if last_output != value:
                    got = last_output.hex() if last_output is not None else "<no generate ran>"
                    return KatResult(vec, "fail", f"ReturnedBits mismatch: got {got}, want {value.hex()}")
            else:
                return KatResult(vec, "fail", f"unknown field {fieldname!r}")
    except Exception as exc:  # a raising vector is a failing vector
        return KatResult(vec, "fail", f"{type(exc).__name__}: {exc}")
    if not compared:
        return KatResult(vec, "fail", "vector never asserted ReturnedBits")
    return KatResult(vec, "pass")


def run_kat_file(path: Path | str) -> list[KatResult]:
    path = Path(path)
    return [run_vector(v) for v in parse_response_text(path.read_text(), path.name)]


def run_kat_dir(path: Path | str) -> list[KatResult]:
    path = Path(path)
    files = sorted(path.glob("*.rsp"))
    if not files:
        raise FileNotFoundError(f"no .rsp vector files under {path}")
    results: list[KatResult] = []
    for f in files:
        results.extend(run_kat_file(f))
    return results


def bundled_vector_dir() -> Path:
    """Directory with the vectors that ship inside the package."""
    return Path(resources.files("dprand") / "kat_vectors")
