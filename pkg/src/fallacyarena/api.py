"""HTTP/JSON facade over the platform.

Handlers hold no state of their own: every request authenticates a token,
delegates to a platform operation, and returns its dict verbatim. GameError
maps to a stable machine code plus a locale key (error.<code>), so clients
localize error texts themselves. Read endpoints never mutate anything.
"""

from __future__ import annotations

from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .domain import FallacyLabel, UserAccount, label_from_code
from .errors import ERROR_STATUS, GameError, err
from .service import Platform


class RegisterBody(BaseModel):
    handle: str
    password: str
    avatar_id: Optional[str] = None


class LoginBody(BaseModel):
    handle: str
    password: str


class StartLevelBody(BaseModel):
    language: str = "en"


class RoundSubmitBody(BaseModel):
    round_id: str
    text: Optional[str] = None
    guess: Optional[str] = None


class MatchCreateBody(BaseModel):
    vs_bot: bool = False
    opponent_handle: Optional[str] = None
    topic_id: Optional[str] = None
    language: str = "en"


class TurnBody(BaseModel):
    expected_version: int
    text: str


class GuessBody(BaseModel):
    expected_version: int
    guess: str


class ReportBody(BaseModel):
    reason: str = ""


class ResolveBody(BaseModel):
    action: str


class NotificationsReadBody(BaseModel):
    ids: list[str] = Field(default_factory=list)


class AggregateBody(BaseModel):
    seed: Optional[int] = None


def _parse_label(code: str) -> FallacyLabel:
    return label_from_code(code)


def create_app(platform: Platform, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="fallacyarena", docs_url=None, redoc_url=None)

    @app.exception_handler(GameError)
    async def on_game_error(request: Request, exc: GameError):
        return JSONResponse(
            status_code=ERROR_STATUS.get(exc.code, 400),
            content={
                "code": exc.code,
                "message": str(exc),
                "message_key": f"error.{exc.code}",
            },
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "schema_violation",
                "message": str(exc.errors()[:1]),
                "message_key": "error.schema_violation",
            },
        )

    def current_user(authorization: Optional[str] = Header(None)) -> UserAccount:
        token = None
        if authorization and authorization.startswith("Bearer "):
            token = authorization.removeprefix("Bearer ").strip()
        return platform.authenticate(token)

    def current_admin(user: UserAccount = Depends(current_user)) -> UserAccount:
        if not user.is_admin:
            raise err("forbidden", "admin role required")
        return user

    # ---- accounts -----------------------------------------------------------

    @app.post("/api/register")
    def register(body: RegisterBody):
        return platform.register(body.handle, body.password, body.avatar_id)

    @app.post("/api/login")
    def login(body: LoginBody):
        return platform.login(body.handle, body.password)

    @app.post("/api/logout")
    def logout(authorization: Optional[str] = Header(None)):
        if authorization and authorization.startswith("Bearer "):
            platform.logout(authorization.removeprefix("Bearer ").strip())
        return {"ok": True}

    @app.get("/api/me")
    def me(user: UserAccount = Depends(current_user)):
        return platform.public_user(platform.engine.user(user.id))

    # ---- gameplay -----------------------------------------------------------

    @app.get("/api/worlds")
    def worlds(user: UserAccount = Depends(current_user)):
        return platform.engine.progression_view(user.id)

    @app.post("/api/levels/{level_id}/start")
    def start_level(level_id: str, body: StartLevelBody, user: UserAccount = Depends(current_user)):
        return platform.engine.start_level(user.id, level_id, body.language)

    @app.get("/api/sessions/{session_id}/round")
    def serve_round(session_id: str, user: UserAccount = Depends(current_user)):
        return platform.engine.serve_round(session_id, user.id)

    @app.post("/api/sessions/{session_id}/round")
    def submit_round(
        session_id: str, body: RoundSubmitBody, user: UserAccount = Depends(current_user)
    ):
        if (body.text is None) == (body.guess is None):
            raise err("schema_violation", "send exactly one of text or guess")
        if body.text is not None:
            return platform.engine.submit_write_round(
                session_id, user.id, body.round_id, body.text
            )
        return platform.engine.submit_recognition_round(
            session_id, user.id, body.round_id, _parse_label(body.guess)
        )

    @app.post("/api/sessions/{session_id}/finish")
    def finish_level(session_id: str, user: UserAccount = Depends(current_user)):
        return platform.engine.finish_level(session_id, user.id)

    @app.get("/api/leaderboard")
    def leaderboard(period: str = Query("all"), user: UserAccount = Depends(current_user)):
        return platform.engine.leaderboard("all_time" if period == "all" else period)

    @app.get("/api/topics")
    def topics(language: str = Query("en"), user: UserAccount = Depends(current_user)):
        return platform.topics_view(language)

    @app.get("/api/locales/{language}")
    def locale(language: str):
        # localization texts are public: the login screen needs them already
        return platform.locale_view(language)

    # ---- duels --------------------------------------------------------------

    @app.post("/api/matches")
    def create_match(body: MatchCreateBody, user: UserAccount = Depends(current_user)):
        opponent = platform.resolve_opponent(user.id, body.opponent_handle, body.vs_bot)
        return platform.pvp.create_match(user.id, opponent, body.topic_id, body.language)

    @app.get("/api/matches")
    def list_matches(user: UserAccount = Depends(current_user)):
        return {"matches": platform.pvp.matches_of(user.id)}

    @app.get("/api/matches/{match_id}")
    def view_match(match_id: str, user: UserAccount = Depends(current_user)):
        return platform.pvp.view_match(match_id, user.id)

    @app.post("/api/matches/{match_id}/turn")
    def submit_turn(match_id: str, body: TurnBody, user: UserAccount = Depends(current_user)):
        return platform.pvp.submit_turn(match_id, user.id, body.expected_version, body.text)

    @app.post("/api/matches/{match_id}/guess")
    def submit_guess(match_id: str, body: GuessBody, user: UserAccount = Depends(current_user)):
        return platform.pvp.submit_guess(
            match_id, user.id, body.expected_version, _parse_label(body.guess)
        )

    @app.get("/api/notifications")
    def notifications(
        since: Optional[str] = Query(None), user: UserAccount = Depends(current_user)
    ):
        return {"notifications": platform.pvp.pull_notifications(user.id, since)}

    @app.post("/api/notifications/read")
    def notifications_read(
        body: NotificationsReadBody, user: UserAccount = Depends(current_user)
    ):
        return {"marked": platform.pvp.mark_notifications_read(user.id, body.ids)}

    # ---- moderation ---------------------------------------------------------

    @app.post("/api/arguments/{argument_id}/report")
    def report(argument_id: str, body: ReportBody, user: UserAccount = Depends(current_user)):
        return platform.moderation.report_spam(user.id, argument_id, body.reason)

    @app.get("/api/admin/spam")
    def admin_spam(
        state: Optional[str] = Query(None), admin: UserAccount = Depends(current_admin)
    ):
        return {"reports": platform.moderation.list_reports(admin.id, state)}

    @app.post("/api/admin/spam/{report_id}")
    def admin_resolve(
        report_id: str, body: ResolveBody, admin: UserAccount = Depends(current_admin)
    ):
        return platform.moderation.resolve_report(admin.id, report_id, body.action)

    @app.post("/api/admin/aggregate")
    def admin_aggregate(body: AggregateBody, admin: UserAccount = Depends(current_admin)):
        return platform.moderation.trigger_aggregation(admin.id, body.seed)

    @app.get("/api/admin/export")
    def admin_export(
        language: Optional[str] = Query(None),
        gold_only: bool = Query(False),
        admin: UserAccount = Depends(current_admin),
    ):
        records = platform.moderation.export_records(language=language, gold_only=gold_only)
        return {"record_count": len(records), "records": records}

    @app.get("/api/admin/stats")
    def admin_stats(admin: UserAccount = Depends(current_admin)):
        return platform.moderation.stats(admin.id)

    if static_dir:
        # the built web client; mounted last so /api/* routes keep precedence
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="client")

    return app
