"""
Checkpoint serialization
Networks round-trip through JSON; floats are written with repr precision so reloads are bit-exact.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
from loguru import logger

from .mlp import MlpParams

FORMAT_VERSION = 1
ACTIVATION = "leaky_relu"


def network_to_dict(net: MlpParams) -> Dict[str, Any]:
    return {
        "role": net.role,
        "layer_sizes": net.layer_sizes,
        "activation": ACTIVATION,
        "negative_slope": net.negative_slope,
        "layers": [
            {"weight": w.tolist(), "bias": b.tolist()}
            for w, b in zip(net.weights, net.biases)
        ],
    }


def network_from_dict(data: Dict[str, Any], expected_role: Optional[str] = None) -> MlpParams:
    try:
        role = data["role"]
        sizes = [int(s) for s in data["layer_sizes"]]
        layers = data["layers"]
        slope = float(data.get("negative_slope", 0.01))
    except (KeyError, TypeError) as e:
        raise ValueError(f"Malformed network entry: missing {e}") from e

    if data.get("activation", ACTIVATION) != ACTIVATION:
        raise ValueError(f"Unsupported activation {data.get('activation')!r}")
    if expected_role is not None and role != expected_role:
        raise ValueError(f"Expected a {expected_role} network, found {role}")
    if len(layers) != len(sizes) - 1:
        raise ValueError(f"{role}: {len(layers)} layers do not match layer_sizes {sizes}")

    weights, biases = [], []
    for i, layer in enumerate(layers):
        w = np.asarray(layer["weight"], dtype=np.float64)
        b = np.asarray(layer["bias"], dtype=np.float64)
        if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
            raise ValueError(
                f"{role}: layer {i} has shapes {w.shape}/{b.shape}, "
                f"expected {(sizes[i], sizes[i + 1])}/{(sizes[i + 1],)}"
            )
        weights.append(w)
        biases.append(b)
    return MlpParams(weights=weights, biases=biases, role=role, negative_slope=slope)


def save_checkpoint(
    path: str,
    networks: Dict[str, MlpParams],
    metadata: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write a set of named networks plus free-form metadata (e.g. n_skills, fingerprint)"""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "format_version": FORMAT_VERSION,
        "metadata": metadata or {},
        "networks": {name: network_to_dict(net) for name, net in networks.items()},
    }
    with open(out, "w") as f:
        json.dump(document, f)
    logger.info(f"Saved checkpoint with {len(networks)} network(s) to {out}")
    return out


def load_checkpoint(path: str) -> Tuple[Dict[str, MlpParams], Dict[str, Any]]:
    src = Path(path)
    if not src.exists():
        raise ValueError(f"Checkpoint not found: {src}")
    try:
        with open(src, "r") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Checkpoint {src} is not valid JSON: {e}") from e

    if not isinstance(document, dict) or "networks" not in document:
        raise ValueError(f"Checkpoint {src} has no networks section")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"Checkpoint {src} has format_version {version}, expected {FORMAT_VERSION}")

    networks = {
        name: network_from_dict(entry)
        for name, entry in document["networks"].items()
    }
    logger.debug(f"Loaded {len(networks)} network(s) from {src}")
    return networks, document.get("metadata", {})
