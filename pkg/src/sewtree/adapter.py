"""HTTP adapter for an external piece-extraction backend.

Wire protocol: POST ``{"step": str, "inventory": [str]}`` to the configured
endpoint; the backend answers ``{"pieces": [str]}``.  Returned labels are
validated against the pattern inventory.
"""

from __future__ import annotations

from dataclasses import dataclass

import requests

from .labels import LabelError, parse_piece_label
from .pipeline import PatternSpec, StepExtraction, extract_pieces_rule_based


class AdapterError(RuntimeError):
    """The extraction backend failed or returned an invalid response."""


@dataclass(frozen=True)
class AdapterConfig:
    url: str
    timeout: float = 10.0
    retries: int = 1
    fallback_to_rules: bool = False


def extract_via_adapter(
    step: str, spec: PatternSpec, endpoint: AdapterConfig, step_index: int = 0
) -> StepExtraction:
    """Extract pieces for one step through the HTTP backend.

    Transport failures are retried ``retries`` times; after that the step
    either fails the document or, with ``fallback_to_rules``, degrades to the
    rule-based extractor with a diagnostic marker.
    """
    inventory = sorted(spec.inventory)
    payload = {"step": step, "inventory": [str(p) for p in inventory]}
    last_error: Exception | None = None
    for _ in range(max(1, endpoint.retries + 1)):
        try:
            response = requests.post(endpoint.url, json=payload, timeout=endpoint.timeout)
            response.raise_for_status()
            data = response.json()
            break
        except (requests.RequestException, ValueError) as exc:
            last_error = exc
    else:
        if endpoint.fallback_to_rules:
            rule = extract_pieces_rule_based(step, spec, step_index=step_index)
            return StepExtraction(
                step_index, rule.mentions, rule.unknown, rule.dropped, source="fallback"
            )
        raise AdapterError(f"extraction backend unreachable: {last_error}") from last_error

    raw = data.get("pieces")
    if not isinstance(raw, list):
        raise AdapterError(f"backend response missing 'pieces' list: {data!r}")
    mentions = []
    for token in raw:
        try:
            piece = parse_piece_label(str(token))
        except LabelError as exc:
            raise AdapterError(f"backend returned malformed label {token!r}") from exc
        if piece not in spec.inventory:
            raise AdapterError(f"backend returned {token!r}, not in the inventory")
        if piece not in mentions:
            mentions.append(piece)
    return StepExtraction(step_index, tuple(mentions), source="adapter")


def make_adapter_extractor(endpoint: AdapterConfig):
    """An extractor callable with the same signature as the rule-based one."""

    def extractor(step: str, spec: PatternSpec, step_index: int = 0) -> StepExtraction:
        return extract_via_adapter(step, spec, endpoint, step_index=step_index)

    return extractor
