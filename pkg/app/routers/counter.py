"""Counter machine endpoints: translate a standard SN P system and compare both runs."""

import structlog
from fastapi import APIRouter

from app.http_errors import domain_errors, ensure_consistent
from app.schemas import CompareRequest, CompareResponse, TranslateRequest, TranslateResponse
from app.services import compare_system, load, translate_system
from app.snp.model import SnpSystem

router = APIRouter(prefix="/counter", tags=["counter"])
logger = structlog.get_logger()


@router.post("/translate", response_model=TranslateResponse)
def translate(body: TranslateRequest):
    """Translate a standard-mode system (other modes answer 422)."""
    with domain_errors():
        system = load(body.source, SnpSystem)
        response = translate_system(system, body.materialize, body.state_cap)
    logger.info("system_translated", system=system.name, x_r=response.x_r, states=response.states)
    return response


@router.post("/compare", response_model=CompareResponse)
def compare(body: CompareRequest):
    """Step the system and its counter machine side by side. A divergence answers 409."""
    with domain_errors():
        system = load(body.source, SnpSystem)
        report = compare_system(system, body.schedule, body.max_T)
    ensure_consistent(report)
    return report
