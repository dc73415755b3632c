"""Platform facade: account lifecycle, token auth, and wiring of the engine,
duel arena, and moderation over one repository.

Passwords are stored only as salted scrypt digests; token values are 128-bit
random strings. A deterministic platform (fixed seed, fixed clock) replays
gameplay bit-identically, which the test harness leans on heavily.
"""

from __future__ import annotations

import hashlib
import hmac
import os
import random
import secrets
from datetime import datetime, timedelta
from typing import Callable, Optional

from .config import (
    ContentPack,
    GameConfig,
    LocaleBundle,
    load_content_pack,
    load_game_config,
    load_locale,
    validate_locale_coverage,
)
from .domain import UserAccount, ts_from_str, ts_to_str, utcnow
from .engine import GameEngine
from .errors import err
from .moderation import Moderation
from .pvp import PvpArena
from .store import Repository, open_repository

TOKEN_TTL_DAYS = 30
MIN_PASSWORD_CHARS = 8
BOT_HANDLE = "the-arguer"

_SCRYPT_N, _SCRYPT_R, _SCRYPT_P = 2**14, 8, 1


def hash_password(password: str, salt: Optional[bytes] = None) -> str:
    salt = salt if salt is not None else secrets.token_bytes(16)
    key = hashlib.scrypt(
        password.encode(), salt=salt, n=_SCRYPT_N, r=_SCRYPT_R, p=_SCRYPT_P
    )
    return f"scrypt${_SCRYPT_N}${_SCRYPT_R}${_SCRYPT_P}${salt.hex()}${key.hex()}"


def verify_password(password: str, digest: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, key_hex = digest.split("$")
        if scheme != "scrypt":
            return False
        key = hashlib.scrypt(
            password.encode(), salt=bytes.fromhex(salt_hex), n=int(n), r=int(r), p=int(p)
        )
        return hmac.compare_digest(key.hex(), key_hex)
    except (ValueError, TypeError):
        return False


class Platform:
    def __init__(
        self,
        repo: Repository,
        config: GameConfig,
        packs: dict[str, ContentPack],
        locales: dict[str, LocaleBundle],
        rng_seed: int = 0,
        now_fn: Callable[[], datetime] = utcnow,
    ):
        self.repo = repo
        self.config = config
        self.packs = packs
        self.locales = locales
        self.now = now_fn
        self.rng = random.Random(rng_seed)
        self.engine = GameEngine(repo, config, packs, self.rng, now_fn)
        self.pvp = PvpArena(self.engine)
        self.moderation = Moderation(self.engine)
        self._install_seed_content()
        self._install_bot()

    # ---- bootstrap ---------------------------------------------------------

    def _install_seed_content(self) -> None:
        """Idempotent: seed arguments are stored under their pack-given ids."""
        for language in sorted(self.packs):
            for seed in self.packs[language].seed_arguments:
                if not self.repo.exists("argument", seed.id):
                    self.repo.put("argument", seed.id, seed.to_dict())

    def _install_bot(self) -> None:
        existing = self.repo.scan("user", lambda e: e.data.get("is_bot", False))
        if existing:
            self.bot_id = existing[0].id
            return
        bot = UserAccount(
            id=self.repo.next_id("user", "user"),
            handle=BOT_HANDLE,
            avatar_id="bot",
            password_digest="!locked",  # no digest matches: bots cannot log in
            roles=("player",),
            total_points=0,
            created_at=self.now(),
            is_bot=True,
        )
        self.repo.put("user", bot.id, bot.to_dict())
        self.bot_id = bot.id

    def ensure_admin(self, handle: str, password: str) -> UserAccount:
        """Create (or promote) an operator account. Not exposed over HTTP."""
        existing = self.repo.scan("user", lambda e: e.data["handle"] == handle)
        if existing:
            account = UserAccount.from_dict(existing[0].data)
            if account.is_admin:
                return account
            data = account.to_dict()
            data["roles"] = sorted(set(account.roles) | {"admin"})
            self.repo.put("user", account.id, data)
            return UserAccount.from_dict(data)
        account = self._create_account(handle, password, roles=("player", "admin"))
        return account

    # ---- accounts and tokens -----------------------------------------------

    def _create_account(
        self, handle: str, password: str, roles=("player",), avatar_id: Optional[str] = None
    ) -> UserAccount:
        if len(password) < MIN_PASSWORD_CHARS:
            raise err("weak_password", f"need at least {MIN_PASSWORD_CHARS} characters")
        if not handle or len(handle) > 32:
            raise err("invalid_handle", "handle must be 1..32 characters")
        if self.repo.scan("user", lambda e: e.data["handle"] == handle):
            raise err("handle_taken", f"handle {handle!r} is in use")
        account = UserAccount(
            id=self.repo.next_id("user", "user"),
            handle=handle,
            avatar_id=avatar_id or f"face-{self.rng.randrange(1, 9)}",
            password_digest=hash_password(password),
            roles=tuple(roles),
            total_points=0,
            created_at=self.now(),
        )
        self.repo.put("user", account.id, account.to_dict())
        return account

    def _issue_token(self, user_id: str) -> dict:
        token = secrets.token_urlsafe(16)
        issued = self.now()
        data = {
            "token": token,
            "user_id": user_id,
            "issued_at": ts_to_str(issued),
            "expires_at": ts_to_str(issued + timedelta(days=TOKEN_TTL_DAYS)),
            "revoked": False,
        }
        self.repo.put("token", token, data)
        return data

    def register(self, handle: str, password: str, avatar_id: Optional[str] = None) -> dict:
        account = self._create_account(handle, password, avatar_id=avatar_id)
        token = self._issue_token(account.id)
        return {"token": token["token"], "user": self.public_user(account)}

    def login(self, handle: str, password: str) -> dict:
        rows = self.repo.scan("user", lambda e: e.data["handle"] == handle)
        # same error for unknown handle and wrong password: no enumeration
        if not rows:
            raise err("bad_credentials", "unknown handle or wrong password")
        account = UserAccount.from_dict(rows[0].data)
        if account.is_bot or not verify_password(password, account.password_digest):
            raise err("bad_credentials", "unknown handle or wrong password")
        token = self._issue_token(account.id)
        return {"token": token["token"], "user": self.public_user(account)}

    def logout(self, token: str) -> None:
        entity = self.repo.get("token", token)
        if entity is None:
            return  # revoking an unknown token is a no-op
        data = dict(entity.data)
        data["revoked"] = True
        self.repo.put("token", token, data)

    def authenticate(self, token: Optional[str]) -> UserAccount:
        if not token:
            raise err("missing_token", "authentication required")
        entity = self.repo.get("token", token)
        if entity is None or entity.data["revoked"]:
            raise err("invalid_token", "token unknown or revoked")
        if ts_from_str(entity.data["expires_at"]) <= self.now():
            raise err("token_expired", "token expired")
        return self.engine.user(entity.data["user_id"])

    def public_user(self, account: UserAccount) -> dict:
        return {
            "user_id": account.id,
            "handle": account.handle,
            "avatar_id": account.avatar_id,
            "roles": list(account.roles),
            "total_points": account.total_points,
        }

    # ---- content views ------------------------------------------------------

    def topics_view(self, language: str) -> dict:
        pack = self.engine.pack(language)
        return {
            "language": language,
            "topics": [t.to_dict() for t in pack.topics],
            "fallacy_descriptions": dict(pack.fallacy_descriptions),
        }

    def locale_view(self, language: str) -> dict:
        if language not in self.locales:
            raise err("unknown_language", f"no locale bundle for {language!r}")
        return {"language": language, "entries": dict(self.locales[language].entries)}

    def resolve_opponent(self, challenger_id: str, opponent_handle: Optional[str], vs_bot: bool) -> str:
        if vs_bot:
            return self.bot_id
        if not opponent_handle:
            raise err("unknown_user", "name an opponent or choose the bot")
        rows = self.repo.scan("user", lambda e: e.data["handle"] == opponent_handle)
        if not rows:
            raise err("unknown_user", f"no player named {opponent_handle!r}")
        return rows[0].id

    def close(self) -> None:
        self.repo.close()


def build_platform(
    config_path: str,
    content_dir: str,
    locale_dir: str,
    journal_path: Optional[str] = None,
    rng_seed: int = 0,
    now_fn: Callable[[], datetime] = utcnow,
) -> Platform:
    """Load every config artifact, cross-validate, and assemble a platform."""
    config = load_game_config(config_path)
    packs = {}
    for name in sorted(os.listdir(content_dir)):
        if name.endswith(".json"):
            pack = load_content_pack(os.path.join(content_dir, name))
            packs[pack.language] = pack
    locales = {}
    for name in sorted(os.listdir(locale_dir)):
        if name.endswith(".json"):
            bundle = load_locale(os.path.join(locale_dir, name))
            locales[bundle.language] = bundle
    if not packs:
        raise err("schema_violation", f"no content packs found in {content_dir!r}")
    validate_locale_coverage(config, locales)
    repo = open_repository(journal_path)
    return Platform(
        repo, config, packs, locales, rng_seed=rng_seed, now_fn=now_fn
    )
