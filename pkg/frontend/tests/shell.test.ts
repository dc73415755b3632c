import { afterEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { App } from "../src/app";
import {
  FakeServer,
  USER,
  flush,
  loginViaForm,
  mountApp,
  progressionWith,
  shippedLocale,
} from "./helpers";

let app: App | null = null;

afterEach(() => {
  app?.shutdown();
  app = null;
});

describe("language switching", () => {
  it("re-renders the whole UI in German with zero unresolved keys", async () => {
    const server = new FakeServer().on("GET /api/worlds", { json: progressionWith(0.5) });
    const mounted = await mountApp(server);
    await loginViaForm(server);
    app = mounted;
    expect(document.body.textContent).toContain("World Map");

    const picker = document.getElementById("language-picker") as HTMLSelectElement;
    picker.value = "de";
    picker.dispatchEvent(new Event("change"));
    await flush();

    expect(document.body.textContent).toContain("Weltkarte");
    expect(document.body.textContent).toContain("Im Nebel verborgen");
    expect(document.body.textContent).not.toContain("World Map");
    expect(document.body.innerHTML).not.toContain("⟦");
    expect(mounted.i18n.missingKeys.size).toBe(0);
    expect(mounted.state.language).toBe("de");

    picker.value = "en";
    picker.dispatchEvent(new Event("change"));
    await flush();
    expect(document.body.textContent).toContain("World Map");
    expect(mounted.i18n.missingKeys.size).toBe(0);
  });

  it("renders the sign-in screen in either language before any login", async () => {
    const server = new FakeServer();
    const mounted = await mountApp(server);
    app = mounted;
    expect(document.body.textContent).toContain("Log in");
    const picker = document.getElementById("language-picker") as HTMLSelectElement;
    picker.value = "de";
    picker.dispatchEvent(new Event("change"));
    await flush();
    expect(document.body.textContent).toContain("Anmelden");
    expect(mounted.i18n.missingKeys.size).toBe(0);
  });
});

describe("session persistence", () => {
  it("restores a saved token on mount and lands on the map", async () => {
    const server = new FakeServer()
      .on("GET /api/locales/en", { json: shippedLocale("en") })
      .on("GET /api/me", { json: USER })
      .on("GET /api/worlds", { json: progressionWith(1.0) });
    localStorage.clear();
    localStorage.setItem("fallacyarena.token", "tok-saved");
    document.body.innerHTML = '<div id="app"></div>';
    const mounted = new App(new ApiClient("/api", server.fetch));
    await mounted.mount(document.getElementById("app")!);
    app = mounted;

    expect(mounted.state.screen).toBe("map");
    const me = server.sent("GET", "/api/me");
    expect(me).toHaveLength(1);
  });

  it("falls back to sign-in when the saved token is rejected", async () => {
    const server = new FakeServer()
      .on("GET /api/locales/en", { json: shippedLocale("en") })
      .on("GET /api/me", {
        status: 401,
        json: {
          code: "invalid_token",
          message: "unknown token",
          message_key: "error.invalid_token",
        },
      });
    localStorage.clear();
    localStorage.setItem("fallacyarena.token", "tok-stale");
    document.body.innerHTML = '<div id="app"></div>';
    const mounted = new App(new ApiClient("/api", server.fetch));
    await mounted.mount(document.getElementById("app")!);
    app = mounted;

    expect(mounted.state.screen).toBe("auth");
    expect(localStorage.getItem("fallacyarena.token")).toBeNull();
  });

  it("logs out server-side and returns to sign-in", async () => {
    const server = new FakeServer()
      .on("GET /api/worlds", { json: progressionWith(1.0) })
      .on("POST /api/logout", { json: { ok: true } });
    const mounted = await mountApp(server);
    await loginViaForm(server);
    app = mounted;
    expect(localStorage.getItem("fallacyarena.token")).toBe("tok-1");

    (document.querySelector(".topbar .logout") as HTMLButtonElement).click();
    await flush();

    expect(server.sent("POST", "/api/logout")).toHaveLength(1);
    expect(mounted.state.screen).toBe("auth");
    expect(localStorage.getItem("fallacyarena.token")).toBeNull();
    expect(mounted.state.user).toBeNull();
  });
});

describe("leaderboard", () => {
  it("toggles between all-time and weekly standings", async () => {
    const server = new FakeServer()
      .on("GET /api/worlds", { json: progressionWith(1.0) })
      .on("GET /api/leaderboard?period=all", {
        json: {
          period: "all_time",
          rankings: [
            { rank: 1, user_id: "user-2", handle: "odin", avatar_id: null, points: 30 },
            { rank: 2, user_id: "user-1", handle: "nora", avatar_id: null, points: 12 },
          ],
          player_of_the_week: null,
        },
      })
      .on("GET /api/leaderboard?period=weekly", {
        json: {
          period: "weekly",
          rankings: [
            { rank: 1, user_id: "user-1", handle: "nora", avatar_id: null, points: 12 },
          ],
          player_of_the_week: { user_id: "user-2", handle: "odin", points: 30 },
        },
      });
    const mounted = await mountApp(server);
    await loginViaForm(server);
    mounted.go("leaderboard");
    await flush();
    app = mounted;

    let rows = [...document.querySelectorAll(".lb-table tr")];
    expect(rows).toHaveLength(3); // header + 2 entries
    expect(rows[1].textContent).toContain("odin");
    // the signed-in player's row is highlighted
    expect(rows[2].classList.contains("me")).toBe(true);

    (document.getElementById("lb-weekly") as HTMLButtonElement).click();
    await flush();

    rows = [...document.querySelectorAll(".lb-table tr")];
    expect(rows).toHaveLength(2);
    expect(document.querySelector(".lb-potw")?.textContent).toContain("odin");
    expect(document.getElementById("lb-weekly")?.classList.contains("active")).toBe(true);
    expect(server.sent("GET", "/api/leaderboard?period=weekly")).toHaveLength(1);
  });
});
