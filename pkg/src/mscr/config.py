"""Run configuration: a ``key = value`` text file plus command-line overrides.

Recognised keys: ``field``, ``omega``, ``n``, ``d``, ``helper_policy``
(``lowest`` or ``random``), ``seed`` and ``output_dir``.  Blank lines and
``#`` comments are ignored.  The ``MSCR_OUTPUT_DIR`` environment variable
overrides ``output_dir`` and nothing else.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .code import CodeParams
from .errors import ParameterError
from .field import FieldSpec

ENV_OUTPUT_DIR = "MSCR_OUTPUT_DIR"
HELPER_POLICIES = ("lowest", "random")
_INT_KEYS = ("omega", "n", "d", "seed")
KEYS = ("field", "omega", "n", "d", "helper_policy", "seed", "output_dir")


@dataclass(frozen=True)
class RunConfig:
    field: str = "2^8"
    omega: Optional[int] = None
    n: int = 5
    d: int = 3
    helper_policy: str = "lowest"
    seed: int = 0
    output_dir: str = "mscr-out"

    def params(self) -> CodeParams:
        return CodeParams(n=self.n, d=self.d)

    def field_spec(self) -> FieldSpec:
        if self.field in ("2^8", "256", "gf256", "GF(2^8)") and self.omega is None:
            return FieldSpec.default()
        return FieldSpec.parse(self.field, self.omega)

    def validate(self) -> "RunConfig":
        self.params()
        self.field_spec()
        if self.helper_policy not in HELPER_POLICIES:
            raise ParameterError(f"helper_policy must be one of {HELPER_POLICIES}, got {self.helper_policy!r}")
        return self

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def output_path(self) -> Path:
        return Path(self.output_dir)

    def to_text(self) -> str:
        return "".join(f"{k} = {'' if getattr(self, k) is None else getattr(self, k)}\n" for k in KEYS)


def parse_config(text: str) -> dict:
    out = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ParameterError(f"config line {num}: unknown key {key!r}")
        if key in _INT_KEYS:
            if value == "":
                out[key] = None
                continue
            try:
                out[key] = int(value, 0)
            except ValueError:
                raise ParameterError(f"config line {num}: {key} must be an integer") from None
        else:
            out[key] = value
    return out


def load_config(path=None, env=None) -> RunConfig:
    """Defaults, then the file at ``path`` (if any), then the environment."""
    env = os.environ if env is None else env
    cfg = RunConfig()
    if path is not None:
        cfg = replace(cfg, **parse_config(Path(path).read_text()))
    if env.get(ENV_OUTPUT_DIR):
        cfg = replace(cfg, output_dir=env[ENV_OUTPUT_DIR])
    return cfg
