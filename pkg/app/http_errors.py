"""Map workbench errors to HTTP responses."""

from contextlib import contextmanager
from typing import Iterator

from fastapi import HTTPException, status

from app.errors import (
    ConventionViolation,
    SourceError,
    StrictPolicyViolation,
    UnsupportedMode,
    WorkbenchError,
)
from app.schemas import CompareResponse, VerifyResponse


def http_error(e: WorkbenchError) -> HTTPException:
    """400 for bad input, 409 for strict violations, 422 for unsupported modes."""
    if isinstance(e, SourceError):
        detail = {"message": e.message, "line": e.line, "column": e.column}
        return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=detail)
    if isinstance(e, ConventionViolation):
        return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail={"problems": e.problems})
    if isinstance(e, StrictPolicyViolation):
        return HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(e))
    if isinstance(e, UnsupportedMode):
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))


@contextmanager
def domain_errors() -> Iterator[None]:
    """Re-raise any ``WorkbenchError`` from the block as an ``HTTPException``."""
    try:
        yield
    except WorkbenchError as e:
        raise http_error(e) from e
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)) from e


def ensure_consistent(report: VerifyResponse | CompareResponse) -> None:
    """Raise HTTP 409 carrying the whole report when a comparison did not match."""
    if not report.ok:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=report.model_dump(mode="json"))
