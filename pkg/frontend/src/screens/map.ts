/** World map: islands, fog of war, level entry, arena gate. */

import type { WorldView } from "../api";
import type { AppContext } from "../context";
import { clear, el, injectStyles } from "../dom";

const CSS = `
  .map-wrap{max-width:760px;margin:0 auto;padding:16px;}
  .map-wrap h1{font-size:20px;letter-spacing:1px;margin:0 0 16px;}
  .world-card{position:relative;overflow:hidden;border:1px solid #3c3a57;border-radius:10px;
    background:#23223a;margin-bottom:18px;padding:18px;}
  .world-card.locked{opacity:0.55;}
  .world-card h2{margin:0 0 2px;font-size:17px;}
  .world-kind{font-size:10px;text-transform:uppercase;letter-spacing:2px;opacity:0.5;
    margin-bottom:12px;}
  .world-lock{font-size:12px;color:#fdcb6e;margin-top:8px;}
  .fog-overlay{position:absolute;top:0;left:0;right:0;pointer-events:none;
    background:linear-gradient(rgba(190,197,224,0.92),rgba(190,197,224,0.55));
    display:flex;align-items:center;justify-content:center;color:#2d3436;
    font-size:11px;letter-spacing:2px;text-transform:uppercase;}
  .level-row{display:flex;align-items:center;gap:10px;padding:7px 0;
    border-top:1px solid #34324e;font-size:14px;}
  .level-row:first-of-type{border-top:none;}
  .level-name{flex:1;}
  .level-state{font-size:11px;opacity:0.6;}
  .level-row button{padding:5px 14px;border-radius:5px;border:none;cursor:pointer;
    background:#6c5ce7;color:#fff;font:inherit;font-size:12px;}
  .level-row button:disabled{background:#4a4868;cursor:not-allowed;}
  .arena-enter{margin-top:10px;padding:8px 18px;border-radius:6px;border:none;
    cursor:pointer;background:#e17055;color:#fff;font:inherit;font-weight:600;}
`;

export class MapScreen {
  constructor(private readonly ctx: AppContext) {}

  render(container: HTMLElement): void {
    injectStyles("map-styles", CSS);
    clear(container);
    const { i18n, state } = this.ctx;
    const wrap = el("div", { class: "map-wrap" });
    wrap.appendChild(el("h1", { text: i18n.t("ui.map.title") }));
    const progression = state.progression;
    if (!progression) {
      container.appendChild(wrap);
      return;
    }
    for (const world of progression.worlds) {
      wrap.appendChild(this.worldCard(world));
    }
    container.appendChild(wrap);
  }

  private worldCard(world: WorldView): HTMLElement {
    const { i18n } = this.ctx;
    const card = el("div", {
      class: world.unlocked ? "world-card" : "world-card locked",
      "data-world-id": world.id,
    });
    card.appendChild(el("h2", { text: i18n.t(world.title_key) }));
    card.appendChild(el("div", { class: "world-kind", text: world.kind }));

    if (world.unlocked && world.kind !== "pvp") {
      for (const level of world.levels) {
        card.appendChild(this.levelRow(level.id, level.completed, level.rounds));
      }
    }
    if (world.unlocked && world.kind === "pvp") {
      const enter = el("button", { class: "arena-enter", text: i18n.t("ui.map.enter") });
      enter.addEventListener("click", () => this.ctx.go("pvp"));
      card.appendChild(enter);
    }
    if (!world.unlocked) {
      const hint =
        world.kind === "pvp"
          ? `${i18n.t("ui.map.locked")} — ${i18n.t("ui.map.pvp_hint")}`
          : i18n.t("ui.map.locked");
      card.appendChild(el("div", { class: "world-lock", text: hint }));
    }

    // The fog layer mirrors the server's fog_fraction one-to-one: the covered
    // share of the card IS the fraction, so progress is visible at a glance.
    if (world.fog_fraction > 0) {
      const fog = el("div", {
        class: "fog-overlay",
        "data-fog-fraction": String(world.fog_fraction),
      });
      fog.style.height = `${world.fog_fraction * 100}%`;
      fog.textContent = i18n.t("ui.map.fog");
      card.appendChild(fog);
    }
    return card;
  }

  private levelRow(levelId: string, completed: boolean, rounds: number): HTMLElement {
    const { i18n } = this.ctx;
    const button = el("button", { text: i18n.t("ui.map.enter"), "data-level-id": levelId });
    button.addEventListener("click", () => void this.enterLevel(levelId));
    return el(
      "div",
      { class: "level-row" },
      el("span", { class: "level-name", text: levelId }),
      el("span", {
        class: "level-state",
        text: completed ? i18n.t("ui.map.completed") : `${rounds} ×`,
      }),
      button,
    );
  }

  private async enterLevel(levelId: string): Promise<void> {
    const { api, state } = this.ctx;
    try {
      state.session = await api.startLevel(levelId, state.language);
      this.ctx.go("round");
    } catch (error) {
      this.ctx.showError(error);
    }
  }
}
