import { afterEach, describe, expect, it } from "vitest";

import type { App } from "../src/app";
import type { SessionView } from "../src/api";
import { FakeServer, flush, loginViaForm, mountApp, progressionWith } from "./helpers";

let app: App | null = null;

afterEach(() => {
  app?.shutdown();
  app = null;
});

function session(cursor: number, state = "in_progress"): SessionView {
  return {
    session_id: "session-1",
    level_id: "level-ad-hominem",
    language: "en",
    state,
    cursor,
    total_rounds: 3,
  };
}

const WRITE_ROUND = {
  session_id: "session-1",
  round_id: "ah-write",
  kind: "write_fallacy",
  cursor: 0,
  total_rounds: 3,
  topic: { id: "t1", title: "School uniforms", description: "Pro or con?" },
  assigned_type: "ad_hominem",
  assigned_type_description: "Attack the person, not the point.",
  explanation_key: "fallacy.ad_hominem.explanation",
  limits: { min_chars: 10, max_chars: 40 },
};

const RECOGNIZE_ROUND = {
  session_id: "session-1",
  round_id: "ah-spot-1",
  kind: "recognize_fallacy",
  cursor: 1,
  total_rounds: 3,
  argument: {
    id: "arg-9",
    text: "Only an idiot would ban phones.",
    topic_id: "t2",
    topic_title: "Phones in class",
  },
  candidate_labels: ["ad_hominem", "no_fallacy"],
};

async function onRound(server: FakeServer, roundPayload: unknown, cursor = 0): Promise<App> {
  server.on("GET /api/worlds", { json: progressionWith(1.0) });
  server.on("GET /api/sessions/session-1/round", { json: roundPayload });
  const mounted = await mountApp(server);
  await loginViaForm(server);
  mounted.state.session = session(cursor);
  mounted.go("round");
  await flush();
  app = mounted;
  return mounted;
}

describe("write rounds", () => {
  it("gates the submit button on the server-sent length limits", async () => {
    const server = new FakeServer();
    await onRound(server, WRITE_ROUND);
    const textarea = document.getElementById("round-text") as HTMLTextAreaElement;
    const submit = document.getElementById("round-submit") as HTMLButtonElement;
    const counter = document.querySelector(".char-count") as HTMLElement;

    expect(submit.disabled).toBe(true); // empty: below min_chars

    textarea.value = "way too short"; // 13 chars, inside 10..40
    textarea.dispatchEvent(new Event("input"));
    expect(submit.disabled).toBe(false);
    expect(counter.textContent).toBe("13 / 40");

    textarea.value = "x".repeat(41); // over max_chars
    textarea.dispatchEvent(new Event("input"));
    expect(submit.disabled).toBe(true);
    expect(counter.classList.contains("out-of-range")).toBe(true);

    // the client never posted anything while the button was gated
    expect(server.sent("POST", "/api/sessions")).toHaveLength(0);
  });

  it("shows the assigned fallacy briefing from the payload", async () => {
    const server = new FakeServer();
    await onRound(server, WRITE_ROUND);
    const badge = document.querySelector(".assigned-type") as HTMLElement;
    expect(badge.textContent).toContain("Ad Hominem");
    expect(badge.textContent).toContain("Attack the person, not the point.");
  });

  it("gives soft feedback with no hint of right or wrong", async () => {
    const server = new FakeServer().on("POST /api/sessions/session-1/round", {
      json: {
        feedback: { kind: "soft", explanation_key: "feedback.soft" },
        reward: 1,
        argument_id: "arg-100",
        session: session(1),
      },
    });
    await onRound(server, WRITE_ROUND);
    const textarea = document.getElementById("round-text") as HTMLTextAreaElement;
    textarea.value = "Only fools disagree.";
    textarea.dispatchEvent(new Event("input"));
    (document.getElementById("round-submit") as HTMLButtonElement).click();
    await flush();

    const modal = document.querySelector(".modal-box") as HTMLElement;
    expect(modal.textContent).toContain(
      "Thanks! Your answer is recorded and will be checked by other players.",
    );
    // provisional: no verdict vocabulary of any kind
    expect(modal.textContent).not.toContain("Correct");
    expect(modal.textContent).not.toContain("Not quite");
    expect(modal.textContent).not.toContain("Crowd verdict");

    const toast = document.querySelector(".toast");
    expect(toast?.textContent).toBe("+1 Points");
  });
});

describe("recognition rounds", () => {
  it("offers exactly the candidate labels the server sent", async () => {
    const server = new FakeServer();
    await onRound(server, RECOGNIZE_ROUND, 1);
    const buttons = [...document.querySelectorAll(".label-grid button")];
    expect(buttons.map((b) => b.getAttribute("data-label"))).toEqual([
      "ad_hominem",
      "no_fallacy",
    ]);
    expect(buttons[0].textContent).toBe("Ad Hominem");
    expect(document.querySelector(".argument-quote")?.textContent).toBe(
      "Only an idiot would ban phones.",
    );
  });

  it("renders the hard-feedback verdict exactly as the server decided it", async () => {
    // The guess sent below matches the gold label, yet the stub says
    // correct=false. A client computing its own verdict would show "Correct!".
    const server = new FakeServer().on("POST /api/sessions/session-1/round", {
      json: {
        feedback: {
          kind: "hard",
          correct: false,
          gold_label: "ad_hominem",
          explanation_key: "fallacy.ad_hominem.explanation",
          explanation: "This argument targets the speaker instead of the claim.",
        },
        reward: 0,
        session: session(2),
      },
    });
    await onRound(server, RECOGNIZE_ROUND, 1);
    (document.querySelector('[data-label="ad_hominem"]') as HTMLButtonElement).click();
    await flush();

    const posted = server.sent("POST", "/api/sessions/session-1/round");
    expect(posted).toHaveLength(1);
    expect(posted[0].body).toEqual({ round_id: "ah-spot-1", guess: "ad_hominem" });

    const modal = document.querySelector(".modal-box") as HTMLElement;
    expect(modal.textContent).toContain("Not quite. Here is what the crowd agreed on.");
    expect(modal.textContent).toContain("Crowd verdict: Ad Hominem");
    expect(modal.textContent).toContain(
      "This argument targets the speaker instead of the claim.",
    );
    expect(modal.textContent).not.toContain("Correct!");
    expect(document.querySelector(".toast")).toBeNull(); // zero reward, no toast
  });

  it("celebrates a server-confirmed correct answer with the reward", async () => {
    const server = new FakeServer().on("POST /api/sessions/session-1/round", {
      json: {
        feedback: {
          kind: "hard",
          correct: true,
          gold_label: "ad_hominem",
          explanation_key: "fallacy.ad_hominem.explanation",
          explanation: "This argument targets the speaker instead of the claim.",
        },
        reward: 3,
        session: session(2),
      },
    });
    await onRound(server, RECOGNIZE_ROUND, 1);
    (document.querySelector('[data-label="ad_hominem"]') as HTMLButtonElement).click();
    await flush();
    const modal = document.querySelector(".modal-box") as HTMLElement;
    expect(modal.textContent).toContain("Correct! You earned bonus points.");
    expect(document.querySelector(".toast")?.textContent).toBe("+3 Points");
  });
});

describe("level completion", () => {
  it("finishes through the server and lands back on the refreshed map", async () => {
    const server = new FakeServer()
      .on("GET /api/worlds", { json: progressionWith(0.8333333333333334) })
      .on("POST /api/sessions/session-1/finish", {
        json: {
          level_id: "level-ad-hominem",
          world_id: "world-island",
          fog_fraction: 0.8333333333333334,
          unlocked_worlds: ["world-island"],
        },
      });
    const mounted = await mountApp(server);
    await loginViaForm(server);
    mounted.state.session = session(3, "completed");
    mounted.go("round");
    await flush();
    app = mounted;

    const finish = document.getElementById("round-finish") as HTMLButtonElement;
    expect(finish).not.toBeNull();
    finish.click();
    await flush();

    expect(server.sent("POST", "/api/sessions/session-1/finish")).toHaveLength(1);
    expect(mounted.state.screen).toBe("map");
    expect(mounted.state.session).toBeNull();
    const fog = document.querySelector(".fog-overlay") as HTMLElement;
    expect(fog.getAttribute("data-fog-fraction")).toBe("0.8333333333333334");
    expect(fog.style.height).toBe("83.33333333333334%");
  });
});
