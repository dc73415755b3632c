"""Error taxonomy shared by every subsystem.

Each error carries a stable machine code from a closed set (documented in
docs/api.md) plus the HTTP status the API layer maps it to. Everything a
caller can mess up raises GameError; internal bugs raise normal exceptions.
"""

from __future__ import annotations


class GameError(Exception):
    """Domain error with a stable machine code."""

    def __init__(self, code: str, message: str = "", http_status: int = 400):
        super().__init__(message or code)
        self.code = code
        self.http_status = http_status


# code -> HTTP status for the API facade. Codes not listed map to 400.
ERROR_STATUS = {
    # validation
    "empty": 400,
    "too_short": 400,
    "too_long": 400,
    "malformed_distribution": 400,
    "weak_password": 400,
    "invalid_spec": 400,
    "schema_violation": 400,
    "parse_error": 400,
    "dangling_reference": 400,
    "cyclic_unlock": 400,
    "duplicate_key": 400,
    "dangling_topic": 400,
    "empty_matrix": 400,
    "wrong_round": 400,
    "session_completed": 400,
    "session_incomplete": 400,
    "content_exhausted": 400,
    "pool_empty": 400,
    "self_match": 400,
    "self_report": 400,
    "invalid_handle": 400,
    "invalid_action": 400,
    "invalid_period": 400,
    # auth
    "bad_credentials": 401,
    "missing_token": 401,
    "invalid_token": 401,
    "token_expired": 401,
    # permission
    "forbidden": 403,
    "world_locked": 403,
    "pvp_locked": 403,
    "not_your_turn": 403,
    "bot_not_owner": 403,
    # missing
    "unknown_level": 404,
    "unknown_argument": 404,
    "unknown_id": 404,
    "unknown_user": 404,
    "unknown_session": 404,
    "unknown_language": 404,
    "unknown_match": 404,
    "unknown_report": 404,
    "unknown_notification": 404,
    "handle_taken": 409,
    # concurrency
    "version_conflict": 409,
    "duplicate_judgment": 409,
    "already_resolved": 409,
    # storage
    "io_error": 500,
    "corrupt_journal": 500,
}


def err(code: str, message: str = "") -> GameError:
    return GameError(code, message, ERROR_STATUS.get(code, 400))
