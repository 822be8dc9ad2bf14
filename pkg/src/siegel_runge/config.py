from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .runge import C_B_CONSERVATIVE, C_B_DEFAULT


@dataclass(frozen=True)
class Config:
    eps: float = 1e-12
    identity_order: int = 64
    relation_order: int = 16
    classification_order: int = 8
    factor_bound: int = 10**6
    general_factorizer: bool = True
    c_b: float = C_B_DEFAULT
    output: str | None = None

    def __post_init__(self):
        for name in ("eps", "identity_order", "relation_order", "classification_order", "factor_bound"):
            if not getattr(self, name) > 0:
                raise ValueError(f"config value {name} must be positive")
        if self.c_b not in (C_B_DEFAULT, C_B_CONSERVATIVE):
            raise ValueError(f"c_b must be {C_B_DEFAULT} or {C_B_CONSERVATIVE}")

    @classmethod
    def load(cls, path) -> Config:
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **kw) -> Config:
        d = asdict(self)
        d.update({k: v for k, v in kw.items() if v is not None})
        return Config(**d)
