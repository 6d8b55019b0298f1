"""JSON config loading for chains and pair models.

Chain config:    {"states": ["s0", ...], "mu": [...], "P": [[...], ...]}
Pair model:      {"chain": <chain>, "alphabet": ["a", ...],
                  "emit": {"s0": [[row-major A x A]], ...}}
Two-chain model: same, but "emit" maps each state to a length-A vector and
                 "independent": true marks the two-copy construction.

All malformed inputs surface as ConfigInvalid naming the offending field.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigInvalid, LabError
from .hmm import PairHMM, TwoChainHMM, two_hmm_as_pair
from .markov import ChainSpec


def load_json(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigInvalid(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise ConfigInvalid("config root must be an object")
    return obj


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigInvalid(f"missing key '{key}' in {where}")
    return obj[key]


def chain_from_config(obj: dict, where: str = "chain") -> ChainSpec:
    states = _require(obj, "states", where)
    mu = _require(obj, "mu", where)
    P = _require(obj, "P", where)
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise ConfigInvalid(f"'states' in {where} must be a list of labels")
    try:
        return ChainSpec(states=tuple(states),
                         mu=np.asarray(mu, dtype=float),
                         P=np.asarray(P, dtype=float))
    except (ValueError, LabError) as exc:
        raise ConfigInvalid(f"bad {where}: {exc}")


def model_from_config(obj: dict) -> PairHMM:
    chain = chain_from_config(_require(obj, "chain", "model"))
    alphabet = _require(obj, "alphabet", "model")
    if not isinstance(alphabet, list) or not alphabet:
        raise ConfigInvalid("'alphabet' must be a non-empty list")
    emit_map = _require(obj, "emit", "model")
    if not isinstance(emit_map, dict):
        raise ConfigInvalid("'emit' must map state labels to matrices")
    missing = [s for s in chain.states if s not in emit_map]
    if missing:
        raise ConfigInvalid(f"'emit' is missing states {missing}")
    extra = [s for s in emit_map if s not in chain.states]
    if extra:
        raise ConfigInvalid(f"'emit' has unknown states {extra}")
    rows = [np.asarray(emit_map[s], dtype=float) for s in chain.states]
    try:
        emit = np.stack(rows)
    except ValueError as exc:
        raise ConfigInvalid(f"emission blocks have inconsistent shapes: {exc}")
    try:
        if obj.get("independent", False):
            if emit.ndim != 2:
                raise ConfigInvalid("two-chain 'emit' entries must be vectors")
            return two_hmm_as_pair(TwoChainHMM(chain=chain, alphabet=tuple(alphabet),
                                               emit=emit))
        if emit.ndim != 3:
            raise ConfigInvalid("pair 'emit' entries must be A x A matrices")
        return PairHMM(chain=chain, alphabet=tuple(alphabet), emit=emit)
    except (ValueError, LabError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(f"bad model: {exc}")


def config_digest(obj: dict) -> str:
    """Stable hash of a config object (key order ignored)."""
    import hashlib

    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
