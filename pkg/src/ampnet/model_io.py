"""Versioned JSON serialization of networks.

Files are human-diffable JSON. Floats are written with Python's shortest
round-trip repr, so save -> load -> save reproduces the file byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .activations import (
    ActivationKind,
    Identity,
    ParametricSoftplus,
    ReLU,
)
from .exceptions import ConfigError
from .network import LayerSpec, Network, NetworkConfig

FORMAT_VERSION = 1


def _primary_to_dict(kind: ActivationKind) -> dict:
    if isinstance(kind, ParametricSoftplus):
        return {"kind": "parametric_softplus", "a": kind.a}
    if isinstance(kind, Identity):
        return {"kind": "identity"}
    if isinstance(kind, ReLU):
        return {"kind": "relu"}
    raise ConfigError(f"unknown primary activation {kind!r}")


def _primary_from_dict(d: dict) -> ActivationKind:
    kind = d.get("kind")
    if kind == "parametric_softplus":
        return ParametricSoftplus(float(d["a"]))
    if kind == "identity":
        return Identity()
    if kind == "relu":
        return ReLU()
    raise ConfigError(f"unknown primary activation kind {kind!r}")


def config_to_dict(config: NetworkConfig) -> dict:
    return {
        "input_dim": config.input_dim,
        "output_dim": config.output_dim,
        "special_layer_range": list(config.special_layer_range)
        if config.special_layer_range is not None
        else None,
        "hidden_layers": [
            {
                "width": spec.width,
                "n_amplifying": spec.n_amplifying,
                "n_attenuating": spec.n_attenuating,
                "primary": _primary_to_dict(spec.primary),
                "attenuate_b": spec.attenuate_b,
            }
            for spec in config.hidden_layers
        ],
    }


def config_from_dict(d: dict) -> NetworkConfig:
    try:
        layers = tuple(
            LayerSpec(
                width=int(spec["width"]),
                n_amplifying=int(spec.get("n_amplifying", 0)),
                n_attenuating=int(spec.get("n_attenuating", 0)),
                primary=_primary_from_dict(
                    spec.get("primary", {"kind": "parametric_softplus", "a": 0.3})
                ),
                attenuate_b=float(spec.get("attenuate_b", 1.0)),
            )
            for spec in d["hidden_layers"]
        )
        rng = d.get("special_layer_range")
        return NetworkConfig(
            input_dim=int(d["input_dim"]),
            hidden_layers=layers,
            output_dim=int(d["output_dim"]),
            special_layer_range=tuple(int(v) for v in rng) if rng is not None else None,
        )
    except (KeyError, TypeError) as err:
        raise ConfigError(f"malformed network config: {err!r}") from err


@dataclass
class ModelFile:
    """In-memory form of a serialized network."""

    config: NetworkConfig
    weights: list
    biases: list
    provenance: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    @classmethod
    def from_network(cls, net: Network, provenance: dict | None = None) -> "ModelFile":
        return cls(
            config=net.config,
            weights=[w.tolist() for w in net.weights],
            biases=[b.tolist() for b in net.biases],
            provenance=dict(provenance or {}),
        )

    def to_network(self) -> Network:
        return Network(self.config, weights=self.weights, biases=self.biases)

    def to_json(self) -> str:
        doc = {
            "format_version": self.format_version,
            "config": config_to_dict(self.config),
            "weights": self.weights,
            "biases": self.biases,
            "provenance": self.provenance,
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ModelFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"malformed model file: {err}") from err
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise ConfigError(
                f"unsupported model format_version {version!r}, expected {FORMAT_VERSION}"
            )
        try:
            return cls(
                config=config_from_dict(doc["config"]),
                weights=doc["weights"],
                biases=doc["biases"],
                provenance=doc.get("provenance", {}),
                format_version=version,
            )
        except KeyError as err:
            raise ConfigError(f"model file missing key {err}") from err


def save_model(net: Network, path, provenance: dict | None = None) -> None:
    Path(path).write_text(
        ModelFile.from_network(net, provenance).to_json(), encoding="utf-8"
    )


def load_model(path) -> tuple[Network, dict]:
    """(network, provenance); the network is validated on construction."""
    model = ModelFile.from_json(Path(path).read_text(encoding="utf-8"))
    return model.to_network(), model.provenance
