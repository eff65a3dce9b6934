"""SN P system endpoints: validate a source, run it on an input schedule."""

import structlog
from fastapi import APIRouter

from app.http_errors import domain_errors
from app.schemas import RunRequest, RunResponse, SourceRequest, ValidateResponse
from app.services import execute_run, load, run_response, validate_source
from app.snp.model import SnpSystem

router = APIRouter(prefix="/systems", tags=["systems"])
logger = structlog.get_logger()


@router.post("/validate", response_model=ValidateResponse)
async def validate_system(body: SourceRequest):
    """Parse any document and list its problems (syntax errors carry line and column)."""
    return validate_source(body.source)


@router.post("/run", response_model=RunResponse)
def run_system(body: RunRequest):
    """Run an SN P system on the given schedule; strict-policy violations end the run with 409."""
    with domain_errors():
        system = load(body.source, SnpSystem)
        trace = execute_run(
            system,
            body.schedule,
            policy=body.policy,
            seed=body.seed,
            max_steps=body.max_steps,
            stop_on_output=body.stop_on_output,
            snapshots=body.trace or None,
        )
        if trace.violation is not None:
            raise trace.violation
        response = run_response(system, trace, include_trace=body.trace)

    logger.info(
        "system_run",
        system=system.name,
        steps=response.steps,
        halt_reason=response.halt_reason,
        output=response.output,
    )
    return response
