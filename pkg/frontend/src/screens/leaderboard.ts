/** Leaderboard with an all-time / weekly toggle and the player of the week. */

import type { LeaderboardView } from "../api";
import type { AppContext } from "../context";
import { clear, el, injectStyles } from "../dom";

const CSS = `
  .lb-wrap{max-width:560px;margin:0 auto;padding:16px;}
  .lb-wrap h1{font-size:20px;letter-spacing:1px;margin:0 0 14px;}
  .lb-toggle{display:flex;gap:8px;margin-bottom:16px;}
  .lb-toggle button{padding:7px 16px;border-radius:6px;cursor:pointer;font:inherit;
    font-size:13px;border:1px solid #4a4868;background:transparent;color:inherit;}
  .lb-toggle button.active{background:#6c5ce7;border-color:#6c5ce7;color:#fff;}
  .lb-potw{margin-bottom:14px;padding:10px 14px;border-radius:8px;background:#2d2b49;
    font-size:14px;}
  .lb-potw .crown{margin-right:6px;}
  .lb-table{width:100%;border-collapse:collapse;font-size:14px;}
  .lb-table th{text-align:left;font-size:11px;text-transform:uppercase;letter-spacing:1px;
    opacity:0.55;padding:6px 8px;border-bottom:1px solid #3c3a57;}
  .lb-table td{padding:8px;border-bottom:1px solid #2d2b49;}
  .lb-table tr.me td{color:#ffeaa7;font-weight:600;}
  .lb-empty{opacity:0.6;font-size:14px;padding:12px 0;}
`;

export class LeaderboardScreen {
  private period: "all" | "weekly" = "all";

  constructor(private readonly ctx: AppContext) {}

  render(container: HTMLElement): void {
    injectStyles("lb-styles", CSS);
    clear(container);
    const wrap = el("div", { class: "lb-wrap" });
    container.appendChild(wrap);
    void this.load(wrap);
  }

  private async load(wrap: HTMLElement): Promise<void> {
    const { api } = this.ctx;
    let view: LeaderboardView;
    try {
      view = await api.leaderboard(this.period);
    } catch (error) {
      this.ctx.showError(error);
      return;
    }
    this.renderView(wrap, view);
  }

  private renderView(wrap: HTMLElement, view: LeaderboardView): void {
    const { i18n, state } = this.ctx;
    clear(wrap);
    wrap.appendChild(el("h1", { text: i18n.t("ui.leaderboard.title") }));

    const allBtn = el("button", {
      id: "lb-all",
      class: this.period === "all" ? "active" : "",
      text: i18n.t("ui.leaderboard.all_time"),
    });
    const weekBtn = el("button", {
      id: "lb-weekly",
      class: this.period === "weekly" ? "active" : "",
      text: i18n.t("ui.leaderboard.weekly"),
    });
    allBtn.addEventListener("click", () => this.switchTo("all", wrap));
    weekBtn.addEventListener("click", () => this.switchTo("weekly", wrap));
    wrap.appendChild(el("div", { class: "lb-toggle" }, allBtn, weekBtn));

    if (view.player_of_the_week) {
      wrap.appendChild(
        el(
          "div",
          { class: "lb-potw" },
          el("span", { class: "crown", text: "👑" }),
          `${i18n.t("ui.leaderboard.player_of_the_week")}: ${view.player_of_the_week.handle}` +
            ` (${view.player_of_the_week.points})`,
        ),
      );
    }

    if (view.rankings.length === 0) {
      wrap.appendChild(el("div", { class: "lb-empty", text: i18n.t("ui.leaderboard.empty") }));
      return;
    }

    const table = el("table", { class: "lb-table" });
    table.appendChild(
      el(
        "tr",
        {},
        el("th", { text: i18n.t("ui.leaderboard.rank") }),
        el("th", { text: i18n.t("ui.leaderboard.player") }),
        el("th", { text: i18n.t("ui.leaderboard.score") }),
      ),
    );
    for (const entry of view.rankings) {
      const row = el(
        "tr",
        { class: entry.user_id === state.user?.user_id ? "me" : "" },
        el("td", { text: String(entry.rank) }),
        el("td", { text: entry.handle }),
        el("td", { text: String(entry.points) }),
      );
      table.appendChild(row);
    }
    wrap.appendChild(table);
  }

  private switchTo(period: "all" | "weekly", wrap: HTMLElement): void {
    this.period = period;
    void this.load(wrap);
  }
}
