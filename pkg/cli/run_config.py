"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: run_config.py                                                   |
|     Authors: dp-decode contributors                                          |
| Description: Run configuration file: schema validation, flag overrides and   |
|              construction of the generation config and logit provider        |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import copy
import logging
from os import getenv
from typing import Optional

import yaml

from accounting.budget import PrivacyBudget
from accounting.notions import ClippingStrategy, ConversionMethod, parse_method
from common.exceptions import ConfigError
from generation.config import GenerationConfig
from providers.ngram import NGramProvider
from providers.provider import DEFAULT_MAX_CONTEXT, LogitProvider
from providers.remote import RemoteLogitsProvider
from providers.vocabulary import Vocabulary


log = logging.getLogger(__name__)

NUMBER = (int, float)

# section -> key -> (accepted types, default)
SCHEMA = {
    "generation": {
        "B": (int, None),
        "tau": (NUMBER, None),
        "T": (int, None),
        "k": (int, None),
        "C": (NUMBER, None),
        "strategy": (str, "dclip"),
        "sensitivity_advantage": (bool, False),
        "recenter": (bool, False),
        "adjacency": (str, "replace_by_null"),
        "seed": (int, 0),
        "query": (str, ""),
        "collect_trace": (bool, False),
        "jobs": (int, 1),
    },
    "accounting": {
        "epsilon": (NUMBER, None),
        "delta": (NUMBER, None),
        "rho": (NUMBER, None),
        "method": (str, "tight"),
    },
    "provider": {
        "type": (str, "ngram"),
        "model": (str, None),
        "url": (str, None),
        "vocabulary": (str, None),
        "max_context": (int, DEFAULT_MAX_CONTEXT),
        "timeout": (NUMBER, 30.0),
        "retries": (int, 3),
        "no_verify": (bool, False),
    },
    "dataset": {
        "references": (str, None),
        "skip_unknown": (bool, True),
    },
    "outputs": {
        "generations": (str, "generations.jsonl"),
        "accounting": (str, "accounting.json"),
        "include_trace": (bool, False),
    },
}

# command line flag -> (section, key)
FLAG_OVERRIDES = {
    "B": ("generation", "B"),
    "tau": ("generation", "tau"),
    "T": ("generation", "T"),
    "k": ("generation", "k"),
    "C": ("generation", "C"),
    "strategy": ("generation", "strategy"),
    "adjacency": ("generation", "adjacency"),
    "seed": ("generation", "seed"),
    "jobs": ("generation", "jobs"),
    "epsilon": ("accounting", "epsilon"),
    "delta": ("accounting", "delta"),
    "rho": ("accounting", "rho"),
    "method": ("accounting", "method"),
}

# target flag -> file values it replaces
TARGET_CONFLICTS = {
    "rho": (("accounting", "epsilon"), ("generation", "C")),
    "epsilon": (("accounting", "rho"), ("generation", "C")),
    "C": (("accounting", "rho"), ("accounting", "epsilon")),
}

PROVIDER_TYPES = ("ngram", "remote")


def _check_value(section: str, key: str, value) -> None:
    types, _ = SCHEMA[section][key]
    if value is None:
        return
    # bool is an int subclass but never a valid number here
    if isinstance(value, bool) and types is not bool:
        raise ConfigError(f"{section}.{key} must be of type {types}, got {value!r}")
    if not isinstance(value, types):
        raise ConfigError(f"{section}.{key} must be of type {types}, got {value!r}")


def validate(data: dict) -> dict:
    """Check a parsed config against SCHEMA and fill in the defaults.

    Args:
        data (dict): the parsed YAML document

    Returns:
        dict: a complete config, every section and key present
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("a run config must be a mapping of sections")
    unknown = sorted(set(data) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config section(s): {unknown}")
    resolved = {}
    for section, keys in SCHEMA.items():
        values = data.get(section) or {}
        if not isinstance(values, dict):
            raise ConfigError(f"config section {section!r} must be a mapping")
        unknown = sorted(set(values) - set(keys))
        if unknown:
            raise ConfigError(f"unknown key(s) in section {section!r}: {unknown}")
        resolved[section] = {}
        for key, (_, default) in keys.items():
            value = values.get(key, default)
            _check_value(section, key, value)
            resolved[section][key] = value
    provider_type = resolved["provider"]["type"]
    if provider_type not in PROVIDER_TYPES:
        raise ConfigError(
            f"provider.type must be one of {PROVIDER_TYPES}, got {provider_type!r}"
        )
    return resolved


class RunConfig:
    """A validated run configuration.

    Sections: generation, accounting, provider, dataset and outputs; see
    cli/run_config_example.yaml for every key.
    """

    def __init__(self, data: Optional[dict] = None) -> None:
        self.data = validate(copy.deepcopy(data))

    @classmethod
    def load(cls, path: Optional[str]) -> "RunConfig":
        """Parse a YAML run config; no path gives the defaults."""
        if path is None:
            return cls()
        try:
            with open(path, "r", encoding="utf-8") as config_file:
                data = yaml.safe_load(config_file)
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from None
        log.debug("Loaded run config %s", path)
        return cls(data)

    def get(self, section: str, key: str):
        return self.data[section][key]

    def apply_args(self, args) -> "RunConfig":
        """Override file values with the command line flags that were given.

        A flag that sets the privacy target (--rho, --epsilon or --C) also
        clears the competing target sources read from the file.
        """
        given = [f for f in TARGET_CONFLICTS if getattr(args, f, None) is not None]
        if len(given) > 1:
            flags = ", ".join("--" + flag for flag in given)
            raise ConfigError("give one privacy target flag, got " + flags)
        for flag in given:
            for section, key in TARGET_CONFLICTS[flag]:
                if self.data[section][key] is not None:
                    log.debug("--%s replaces %s.%s from the file", flag, section, key)
                self.data[section][key] = None
        for flag, (section, key) in FLAG_OVERRIDES.items():
            value = getattr(args, flag, None)
            if value is not None:
                _check_value(section, key, value)
                self.data[section][key] = value
        return self

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    @property
    def method(self) -> ConversionMethod:
        try:
            return parse_method(self.get("accounting", "method"))
        except ValueError as e:
            raise ConfigError(str(e)) from None

    @property
    def delta(self) -> Optional[float]:
        return self.get("accounting", "delta")

    def target(self) -> Optional[PrivacyBudget]:
        """The privacy target, from rho or from (epsilon, delta); None if
        neither is set."""
        accounting = self.data["accounting"]
        try:
            if accounting["rho"] is not None:
                return PrivacyBudget.from_rho(
                    accounting["rho"], accounting["delta"], self.method
                )
            if accounting["epsilon"] is not None:
                if accounting["delta"] is None:
                    raise ConfigError("epsilon needs a delta")
                return PrivacyBudget.from_epsilon(
                    accounting["epsilon"], accounting["delta"], self.method
                )
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from None
        return None

    def generation_config(self) -> GenerationConfig:
        """Build the (uncalibrated) GenerationConfig of this run."""
        generation = self.data["generation"]
        missing = [key for key in ("B", "tau", "T") if generation[key] is None]
        if missing:
            raise ConfigError(f"generation setting(s) {missing} are required")
        try:
            strategy = ClippingStrategy(
                generation["strategy"], generation["sensitivity_advantage"]
            )
        except ValueError as e:
            raise ConfigError(str(e)) from None
        return GenerationConfig(
            B=generation["B"],
            tau=float(generation["tau"]),
            T=generation["T"],
            k=generation["k"],
            C=None if generation["C"] is None else float(generation["C"]),
            strategy=strategy,
            adjacency=generation["adjacency"],
            target=self.target(),
            seed=generation["seed"],
            recenter=generation["recenter"],
            collect_trace=generation["collect_trace"],
        )

    def build_provider(self, token: Optional[str] = None) -> LogitProvider:
        """The logit provider named in the provider section.

        Args:
            token (str): bearer token of the remote provider

        Returns:
            LogitProvider: an n-gram or remote provider
        """
        provider = self.data["provider"]
        if provider["type"] == "ngram":
            if provider["model"] is None:
                raise ConfigError("provider.model is required for an ngram provider")
            return NGramProvider.load(
                provider["model"], max_context=provider["max_context"]
            )
        url = provider["url"] or getenv("DPDECODE_REMOTE_URL")
        if url is None:
            raise ConfigError(
                "provider.url or $DPDECODE_REMOTE_URL is required for a remote "
                + "provider"
            )
        if provider["vocabulary"] is None:
            raise ConfigError("provider.vocabulary is required for a remote provider")
        return RemoteLogitsProvider(
            url,
            Vocabulary.load(provider["vocabulary"]),
            token=token,
            max_context=provider["max_context"],
            timeout=provider["timeout"],
            retries=provider["retries"],
            no_verify=provider["no_verify"],
        )
