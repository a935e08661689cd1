"""Check the service routes against the OpenAPI contract in ``spec/openapi.yaml``."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml
from fastapi import FastAPI
from fastapi.routing import APIRoute

HTTP_METHODS = {"get", "post", "put", "patch", "delete"}
DEFAULT_CONTRACT = Path(__file__).resolve().parents[2] / "spec" / "openapi.yaml"


@dataclass
class ContractReport:
    """Endpoints missing on either side of the contract."""

    missing: list[tuple[str, str]] = field(default_factory=list)
    undocumented: list[tuple[str, str]] = field(default_factory=list)

    @property
    def is_compliant(self) -> bool:
        """True when service and contract list the same endpoints."""
        return not self.missing and not self.undocumented

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "is_compliant": self.is_compliant,
            "missing": [f"{m} {p}" for m, p in self.missing],
            "undocumented": [f"{m} {p}" for m, p in self.undocumented],
        }


def contract_endpoints(spec_path: str | Path = DEFAULT_CONTRACT) -> set[tuple[str, str]]:
    """(METHOD, path) pairs declared in an OpenAPI document."""
    with open(spec_path) as f:
        spec = yaml.safe_load(f) or {}
    endpoints = set()
    for path, item in spec.get("paths", {}).items():
        for method in item:
            if method.lower() in HTTP_METHODS:
                endpoints.add((method.upper(), path))
    return endpoints


def app_endpoints(app: FastAPI) -> set[tuple[str, str]]:
    """(METHOD, path) pairs served by the application, excluding the docs routes."""
    endpoints = set()
    for route in app.routes:
        if isinstance(route, APIRoute) and route.include_in_schema:
            for method in route.methods:
                if method.lower() in HTTP_METHODS:
                    endpoints.add((method.upper(), route.path))
    return endpoints


def check_contract(app: FastAPI, spec_path: str | Path = DEFAULT_CONTRACT) -> ContractReport:
    """Compare the served endpoints with the contract."""
    declared = contract_endpoints(spec_path)
    served = app_endpoints(app)
    return ContractReport(
        missing=sorted(declared - served),
        undocumented=sorted(served - declared),
    )
