"""Turing machine endpoints: encode a configuration, build the universal and input systems, verify."""

import structlog
from fastapi import APIRouter

from app.http_errors import domain_errors, ensure_consistent
from app.schemas import (
    ConfigRequest,
    EncodeResponse,
    InputEncoderRequest,
    InputEncoderResponse,
    SourceRequest,
    SystemTextResponse,
    VerifyRequest,
    VerifyResponse,
)
from app.services import encode_tape, input_encoder_text, load, universal_text, verify_tape
from app.turing import TmSpec

router = APIRouter(prefix="/machines", tags=["machines"])
logger = structlog.get_logger()


@router.post("/encode", response_model=EncodeResponse)
async def encode(body: ConfigRequest):
    """Encode a tape/state as (X, Y, code) and the loading schedule of the universal system."""
    with domain_errors():
        spec = load(body.source, TmSpec)
        return encode_tape(spec, body.tape, body.head, body.state)


@router.post("/universal", response_model=SystemTextResponse)
def universal(body: SourceRequest):
    """Build the ten-neuron system that simulates the machine."""
    with domain_errors():
        spec = load(body.source, TmSpec)
        response = universal_text(spec)
    logger.info("universal_served", machine=spec.name, rules=response.rules, overlaps=len(response.overlaps))
    return response


@router.post("/input-encoder", response_model=InputEncoderResponse)
def input_encoder(body: InputEncoderRequest):
    """Build the six-neuron input encoder, plus the input word when ``cells`` is given."""
    with domain_errors():
        spec = load(body.source, TmSpec)
        return input_encoder_text(spec, body.cells)


@router.post("/verify", response_model=VerifyResponse)
def verify(body: VerifyRequest):
    """Run the universal system against the arithmetic oracle. A mismatch answers 409 with the report."""
    with domain_errors():
        spec = load(body.source, TmSpec)
        report = verify_tape(spec, body.tape, body.head, body.state, body.steps)
    logger.info("machine_verified", machine=spec.name, boundaries=len(report.boundaries), ok=report.ok)
    ensure_consistent(report)
    return report
