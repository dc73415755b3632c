/** Shared test scaffolding: canned payloads and a route-table fetch stub. */

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { ApiClient } from "../src/api";
import type { FetchLike, LocaleView, MatchView, ProgressionView } from "../src/api";
import { App } from "../src/app";

const HERE = path.dirname(fileURLToPath(import.meta.url));

/** The real shipped locale bundles, so tests exercise production keys. */
export function shippedLocale(language: string): LocaleView {
  const file = path.resolve(HERE, "../../config/locales", `${language}.json`);
  return JSON.parse(readFileSync(file, "utf8")) as LocaleView;
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export type RouteHandler = (body: unknown) =>
  | { status?: number; json: unknown }
  | Promise<{ status?: number; json: unknown }>;

/**
 * fetch stub driven by a `"METHOD /path"` route table. Records every call so
 * tests can audit exactly what the client sent — and what it never sent.
 */
export class FakeServer {
  readonly calls: RecordedCall[] = [];
  private readonly routes = new Map<string, RouteHandler>();

  on(route: string, handler: RouteHandler | { json: unknown; status?: number }): this {
    this.routes.set(route, typeof handler === "function" ? handler : () => handler);
    return this;
  }

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const parsed = new URL(url, "http://fake.test");
    const key = `${method} ${parsed.pathname}${parsed.search}`;
    const bareKey = `${method} ${parsed.pathname}`;
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    this.calls.push({ method, path: `${parsed.pathname}${parsed.search}`, body });
    const handler = this.routes.get(key) ?? this.routes.get(bareKey);
    if (!handler) {
      return jsonResponse(404, {
        code: "unknown_id",
        message: `no stub for ${key}`,
        message_key: "error.unknown_id",
      });
    }
    const result = await handler(body);
    return jsonResponse(result.status ?? 200, result.json);
  };

  sent(method: string, pathPrefix: string): RecordedCall[] {
    return this.calls.filter((c) => c.method === method && c.path.startsWith(pathPrefix));
  }
}

function jsonResponse(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function gameError(status: number, code: string, message: string) {
  return { status, json: { code, message, message_key: `error.${code}` } };
}

// ---- canned views -----------------------------------------------------------

export const USER = {
  user_id: "user-1",
  handle: "nora",
  avatar_id: null,
  roles: [],
  total_points: 0,
};

export function progressionWith(fog: number, arenaUnlocked = false): ProgressionView {
  return {
    total_points: 7,
    worlds: [
      {
        id: "world-island",
        title_key: "world.island.title",
        theme: "island",
        kind: "solo",
        unlocked: true,
        fog_fraction: fog,
        levels: [
          { id: "level-ad-hominem", completed: fog < 1, rounds: 3 },
          { id: "level-emotion", completed: false, rounds: 2 },
        ],
      },
      {
        id: "world-arena",
        title_key: "world.arena.title",
        theme: "arena",
        kind: "pvp",
        unlocked: arenaUnlocked,
        fog_fraction: arenaUnlocked ? 0 : 1,
        levels: [],
      },
    ],
  };
}

export function matchFixture(overrides: Partial<MatchView> = {}): MatchView {
  return {
    match_id: "match-1",
    topic_id: "en-t-phones",
    language: "en",
    players: [
      { user_id: "user-1", handle: "nora", is_bot: false },
      { user_id: "user-2", handle: "bot", is_bot: true },
    ],
    state: "awaiting_write",
    turn_owner: "user-1",
    version: 1,
    rounds_total: 4,
    exchanges: [
      {
        writer: "user-1",
        argument_id: null,
        argument_text: null,
        assigned_type: "ad_hominem",
        guess: null,
        guess_correct: null,
      },
    ],
    your_turn: true,
    ...overrides,
  };
}

/** Wait until queued microtasks/timers from async render paths settle. */
export async function flush(ms = 0): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, ms));
  await Promise.resolve();
}

/** Mount a fresh App against a FakeServer inside a clean document. */
export async function mountApp(server: FakeServer): Promise<App> {
  localStorage.clear();
  document.body.innerHTML = "";
  document.head.querySelectorAll("style").forEach((s) => s.remove());
  const host = document.createElement("div");
  host.id = "app";
  document.body.appendChild(host);
  server.on("GET /api/locales/en", { json: shippedLocale("en") });
  server.on("GET /api/locales/de", { json: shippedLocale("de") });
  const app = new App(new ApiClient("/api", server.fetch));
  await app.mount(host);
  return app;
}

/** Sign in through the real form against stubbed auth routes. */
export async function loginViaForm(server: FakeServer): Promise<void> {
  server.on("POST /api/login", { json: { token: "tok-1", user: USER } });
  server.on("GET /api/me", { json: USER });
  const handle = document.getElementById("auth-handle") as HTMLInputElement;
  const password = document.getElementById("auth-password") as HTMLInputElement;
  handle.value = "nora";
  password.value = "pw-secret-99";
  (document.querySelector(".auth-actions .primary") as HTMLButtonElement).click();
  await flush();
}
