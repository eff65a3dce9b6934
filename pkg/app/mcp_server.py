"""MCP server exposing the workbench as LLM-friendly tools. Mount at /mcp in the FastAPI app."""

from typing import Any

from fastapi import HTTPException
from fastmcp import FastMCP

from app.http_errors import domain_errors
from app.services import execute_run, load, run_response, universal_text, validate_source, verify_tape
from app.snp.model import SnpSystem
from app.turing import TmSpec

mcp = FastMCP("SN P Workbench")


def _handle_http_error(e: HTTPException) -> dict[str, Any]:
    """Turn HTTPException into an MCP-friendly result dict."""
    return {"error": e.detail, "status_code": e.status_code}


@mcp.tool
def validate_system(source: str) -> dict[str, Any]:
    """Parse a system, tm or cm document and list its problems."""
    return validate_source(source).model_dump()


@mcp.tool
def run_system(
    source: str,
    schedule: dict[int, int] | None = None,
    policy: str | None = None,
    seed: int | None = None,
    max_steps: int | None = None,
) -> dict[str, Any]:
    """Run an SN P system; ``schedule`` maps time to spikes entering the input neuron."""
    try:
        with domain_errors():
            system = load(source, SnpSystem)
            trace = execute_run(system, schedule, policy=policy, seed=seed, max_steps=max_steps)
            return run_response(system, trace).model_dump()
    except HTTPException as e:
        return _handle_http_error(e)


@mcp.tool
def build_universal(source: str) -> dict[str, Any]:
    """Compile a Turing machine into the ten-neuron universal system (text format)."""
    try:
        with domain_errors():
            return universal_text(load(source, TmSpec)).model_dump()
    except HTTPException as e:
        return _handle_http_error(e)


@mcp.tool
def verify_machine(
    source: str,
    tape: list[int] | None = None,
    head: int = 0,
    state: int = 1,
    steps: int = 20,
) -> dict[str, Any]:
    """Check the universal system against direct arithmetic for ``steps`` transitions."""
    try:
        with domain_errors():
            spec = load(source, TmSpec)
            return verify_tape(spec, tape or [1], head, state, steps).model_dump()
    except HTTPException as e:
        return _handle_http_error(e)
