import { afterEach, describe, expect, it } from "vitest";

import type { App } from "../src/app";
import { FakeServer, flush, loginViaForm, mountApp, progressionWith } from "./helpers";

let app: App | null = null;

afterEach(() => {
  app?.shutdown();
  app = null;
});

async function onMap(server: FakeServer): Promise<App> {
  const mounted = await mountApp(server);
  await loginViaForm(server);
  app = mounted;
  return mounted;
}

describe("world map", () => {
  it("binds the fog overlay height to the server's fog fraction", async () => {
    const server = new FakeServer().on("GET /api/worlds", {
      json: progressionWith(0.5),
    });
    await onMap(server);
    const island = document.querySelector('[data-world-id="world-island"]')!;
    const fog = island.querySelector(".fog-overlay") as HTMLElement;
    expect(fog).not.toBeNull();
    expect(fog.style.height).toBe("50%");
    expect(fog.getAttribute("data-fog-fraction")).toBe("0.5");
  });

  it("renders no fog layer once a world is fully explored", async () => {
    const server = new FakeServer().on("GET /api/worlds", {
      json: progressionWith(0),
    });
    await onMap(server);
    const island = document.querySelector('[data-world-id="world-island"]')!;
    expect(island.querySelector(".fog-overlay")).toBeNull();
  });

  it("shows a locked arena with the unlock hint and no way in", async () => {
    const server = new FakeServer().on("GET /api/worlds", {
      json: progressionWith(0.5, false),
    });
    await onMap(server);
    const arena = document.querySelector('[data-world-id="world-arena"]') as HTMLElement;
    expect(arena.classList.contains("locked")).toBe(true);
    expect(arena.querySelector(".world-lock")?.textContent).toContain(
      "Finish the first island",
    );
    expect(arena.querySelector(".arena-enter")).toBeNull();
  });

  it("opens the duel lobby from an unlocked arena", async () => {
    const server = new FakeServer()
      .on("GET /api/worlds", { json: progressionWith(0, true) })
      .on("GET /api/matches", { json: { matches: [] } });
    const mounted = await onMap(server);
    const arena = document.querySelector('[data-world-id="world-arena"]')!;
    (arena.querySelector(".arena-enter") as HTMLButtonElement).click();
    await flush();
    expect(mounted.state.screen).toBe("pvp");
    expect(document.getElementById("pvp-challenge-bot")).not.toBeNull();
  });

  it("starts a level on the server and moves to the round screen", async () => {
    const server = new FakeServer()
      .on("GET /api/worlds", { json: progressionWith(1.0) })
      .on("POST /api/levels/level-ad-hominem/start", {
        json: {
          session_id: "session-1",
          level_id: "level-ad-hominem",
          language: "en",
          state: "in_progress",
          cursor: 0,
          total_rounds: 3,
        },
      })
      .on("GET /api/sessions/session-1/round", {
        json: {
          session_id: "session-1",
          round_id: "ah-write",
          kind: "write_fallacy",
          cursor: 0,
          total_rounds: 3,
          topic: { id: "t1", title: "School uniforms", description: "Pro or con?" },
          assigned_type: "ad_hominem",
          assigned_type_description: "Attack the person.",
          explanation_key: "fallacy.ad_hominem.explanation",
          limits: { min_chars: 10, max_chars: 600 },
        },
      });
    const mounted = await onMap(server);
    const enter = document.querySelector('[data-level-id="level-ad-hominem"]') as HTMLButtonElement;
    enter.click();
    await flush();
    expect(mounted.state.screen).toBe("round");
    expect(mounted.state.session?.session_id).toBe("session-1");
    const start = server.sent("POST", "/api/levels/level-ad-hominem/start");
    expect(start).toHaveLength(1);
    expect(start[0].body).toEqual({ language: "en" });
    expect(document.querySelector('[data-round-kind="write_fallacy"]')).not.toBeNull();
  });

  it("surfaces a world_locked rejection as a localized toast", async () => {
    const server = new FakeServer()
      .on("GET /api/worlds", { json: progressionWith(1.0) })
      .on("POST /api/levels/level-ad-hominem/start", {
        status: 403,
        json: {
          code: "world_locked",
          message: "world 'world-island' is still locked",
          message_key: "error.world_locked",
        },
      });
    const mounted = await onMap(server);
    (document.querySelector('[data-level-id="level-ad-hominem"]') as HTMLButtonElement).click();
    await flush();
    expect(mounted.state.screen).toBe("map");
    const toast = document.querySelector(".toast");
    expect(toast?.textContent).toBe("This world is still locked.");
  });
});
