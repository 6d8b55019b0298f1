import json
from pathlib import Path

import numpy as np
import pytest

from lcslab import ChainSpec, PairHMM, TwoChainHMM, model_from_config, two_hmm_as_pair

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def load_model(name: str) -> PairHMM:
    with open(CONFIG_DIR / name, "r", encoding="utf-8") as fh:
        return model_from_config(json.load(fh))


@pytest.fixture(scope="session")
def iid_uniform2() -> PairHMM:
    """Two independent i.i.d.-uniform binary words; stationary, symmetric."""
    return load_model("iid_uniform2.json")


@pytest.fixture(scope="session")
def copy_uniform2() -> PairHMM:
    """X = Y uniform binary: fully dependent degenerate pair."""
    return load_model("copy_uniform2.json")


@pytest.fixture(scope="session")
def dependent2() -> PairHMM:
    """2-state, 2-letter dependent pair emissions, non-stationary start."""
    return load_model("dependent2.json")


@pytest.fixture(scope="session")
def dependent2_stationary(dependent2) -> PairHMM:
    chain = dependent2.chain
    return PairHMM(chain=ChainSpec(states=chain.states, mu=chain.pi, P=chain.P),
                   alphabet=dependent2.alphabet, emit=dependent2.emit)


@pytest.fixture(scope="session")
def bernoulli_mix() -> PairHMM:
    """Independent X ~ Bernoulli(1/3), Y ~ Bernoulli(1/2); marginals differ."""
    return load_model("bernoulli_mix.json")


@pytest.fixture(scope="session")
def lazy3() -> PairHMM:
    """3-state, 3-letter independent two-chain model."""
    return load_model("lazy3.json")


@pytest.fixture(scope="session")
def copy_uniform3() -> PairHMM:
    """X = Y uniform ternary."""
    chain = ChainSpec(states=("s",), mu=np.array([1.0]), P=np.array([[1.0]]))
    return PairHMM(chain=chain, alphabet=("0", "1", "2"),
                   emit=np.eye(3)[None, :, :] / 3.0)


@pytest.fixture(scope="session")
def all_fixtures(iid_uniform2, copy_uniform2, dependent2, dependent2_stationary,
                 bernoulli_mix, lazy3, copy_uniform3):
    return {
        "iid_uniform2": iid_uniform2,
        "copy_uniform2": copy_uniform2,
        "dependent2": dependent2,
        "dependent2_stationary": dependent2_stationary,
        "bernoulli_mix": bernoulli_mix,
        "lazy3": lazy3,
        "copy_uniform3": copy_uniform3,
    }


def random_chain(rng_obj: np.random.Generator, n_states: int) -> ChainSpec:
    P = rng_obj.dirichlet(np.ones(n_states) * 2.0, size=n_states)
    mu = rng_obj.dirichlet(np.ones(n_states) * 2.0)
    return ChainSpec(states=tuple(f"s{i}" for i in range(n_states)),
                     mu=mu, P=P)


def random_pair_hmm(rng_obj: np.random.Generator, n_states: int, n_letters: int) -> PairHMM:
    chain = random_chain(rng_obj, n_states)
    emit = rng_obj.dirichlet(np.ones(n_letters * n_letters),
                             size=n_states).reshape(n_states, n_letters, n_letters)
    return PairHMM(chain=chain, alphabet=tuple(str(a) for a in range(n_letters)),
                   emit=emit)
