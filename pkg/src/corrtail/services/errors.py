from typing import Any, Dict, Optional


class CorrtailError(Exception):
    """Error raised by corrtail services, shaped like an HTTP error response.

    status_code keeps its HTTP meaning: 400 malformed input, 404 unknown
    reference, 413 budget exceeded, 422 violated precondition.
    """

    def __init__(self, status_code: int, detail: str):
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail

    def to_dict(self) -> Dict[str, Any]:
        return {"status_code": self.status_code, "detail": self.detail}


class VerificationError(CorrtailError):
    """A computed identity failed; carries the counterexample that shows it."""

    def __init__(self, detail: str, counterexample: Optional[Dict[str, Any]] = None):
        super().__init__(status_code=500, detail=detail)
        self.counterexample = counterexample or {}

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload["counterexample"] = self.counterexample
        return payload
