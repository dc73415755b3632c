/** Duels: match list, challenge form, and the write/guess turn loop.
 *
 * Every mutation sends the version from the last match view we rendered. If
 * the server answers 409 version_conflict the view is simply stale: re-fetch
 * and re-render, never retry blindly.
 */

import { ApiError, type FallacyCode, type MatchView } from "../api";
import type { AppContext } from "../context";
import { clear, el, injectStyles } from "../dom";

const ALL_LABELS: FallacyCode[] = [
  "ad_hominem",
  "appeal_to_emotion",
  "red_herring",
  "hasty_generalization",
  "irrelevant_authority",
  "no_fallacy",
];

const CSS = `
  .pvp-wrap{max-width:680px;margin:0 auto;padding:16px;}
  .pvp-wrap h1{font-size:20px;letter-spacing:1px;margin:0 0 16px;}
  .challenge-bar{display:flex;gap:8px;margin-bottom:18px;flex-wrap:wrap;}
  .challenge-bar input{flex:1;min-width:140px;padding:8px 10px;border-radius:6px;
    border:1px solid #4a4868;background:#1a1930;color:inherit;font:inherit;}
  .challenge-bar button{padding:8px 16px;border-radius:6px;border:none;cursor:pointer;
    background:#e17055;color:#fff;font:inherit;font-weight:600;}
  .match-card{border:1px solid #3c3a57;border-radius:10px;background:#23223a;
    padding:14px 16px;margin-bottom:12px;}
  .match-line{display:flex;justify-content:space-between;align-items:center;font-size:14px;}
  .match-line .vs{font-weight:600;}
  .match-line button{padding:5px 14px;border-radius:5px;border:none;cursor:pointer;
    background:#6c5ce7;color:#fff;font:inherit;font-size:12px;}
  .match-state{font-size:11px;text-transform:uppercase;letter-spacing:1px;opacity:0.55;}
  .exchange{border-top:1px solid #34324e;padding:10px 0;font-size:14px;}
  .exchange .who{font-size:11px;opacity:0.6;text-transform:uppercase;letter-spacing:1px;}
  .exchange .text{font-style:italic;margin:6px 0;}
  .exchange .verdict{font-size:13px;}
  .exchange .verdict.right{color:#55efc4;}
  .exchange .verdict.wrong{color:#ff7675;}
  .turn-box{margin-top:14px;padding:14px;border-radius:8px;background:#2d2b49;}
  .turn-box h3{margin:0 0 8px;font-size:14px;}
  .turn-box .secret-type{color:#ffeaa7;font-weight:700;}
  .turn-box textarea{width:100%;box-sizing:border-box;min-height:90px;margin-top:6px;
    padding:10px;border-radius:6px;border:1px solid #4a4868;background:#1a1930;
    color:inherit;font:inherit;resize:vertical;}
  .turn-box .guess-grid{display:grid;grid-template-columns:1fr 1fr;gap:8px;margin-top:8px;}
  .turn-box .guess-grid button{padding:9px;border-radius:6px;border:1px solid #4a4868;
    cursor:pointer;background:#1a1930;color:inherit;font:inherit;font-size:13px;}
  .turn-box .actions{margin-top:10px;}
  .turn-box .actions button{padding:9px 20px;border-radius:6px;border:none;cursor:pointer;
    background:#6c5ce7;color:#fff;font:inherit;font-weight:600;}
  .turn-box .actions button:disabled{background:#4a4868;cursor:not-allowed;}
  .pvp-back{margin-bottom:14px;padding:6px 14px;border-radius:6px;cursor:pointer;
    border:1px solid #4a4868;background:transparent;color:inherit;font:inherit;font-size:12px;}
`;

export class PvpScreen {
  constructor(private readonly ctx: AppContext) {}

  render(container: HTMLElement): void {
    injectStyles("pvp-styles", CSS);
    clear(container);
    const wrap = el("div", { class: "pvp-wrap" });
    container.appendChild(wrap);
    const activeId = this.ctx.state.activeMatchId;
    if (activeId) void this.renderMatch(wrap, activeId);
    else void this.renderLobby(wrap);
  }

  // ---- lobby ---------------------------------------------------------------

  private async renderLobby(wrap: HTMLElement): Promise<void> {
    const { api, i18n, state } = this.ctx;
    try {
      state.matches = (await api.listMatches()).matches;
    } catch (error) {
      this.ctx.showError(error);
      return;
    }
    clear(wrap);
    wrap.appendChild(el("h1", { text: i18n.t("ui.pvp.title") }));

    const opponent = el("input", {
      id: "pvp-opponent",
      placeholder: i18n.t("ui.pvp.opponent_handle"),
    });
    const challengeBtn = el("button", { text: i18n.t("ui.pvp.challenge_player") });
    challengeBtn.addEventListener("click", () =>
      void this.createMatch({ opponentHandle: opponent.value.trim() }),
    );
    const botBtn = el("button", {
      id: "pvp-challenge-bot",
      text: i18n.t("ui.pvp.challenge_bot"),
    });
    botBtn.addEventListener("click", () => void this.createMatch({ vsBot: true }));
    wrap.appendChild(el("div", { class: "challenge-bar" }, opponent, challengeBtn, botBtn));

    for (const match of state.matches) {
      wrap.appendChild(this.matchRow(match));
    }
  }

  private matchRow(match: MatchView): HTMLElement {
    const { i18n } = this.ctx;
    const names = match.players.map((p) => p.handle).join(" · ");
    const open = el("button", { text: i18n.t("ui.map.enter"), "data-match-id": match.match_id });
    open.addEventListener("click", () => {
      this.ctx.state.activeMatchId = match.match_id;
      this.ctx.rerender();
    });
    const stateText =
      match.state === "finished"
        ? i18n.t("ui.pvp.finished")
        : match.your_turn
          ? match.state === "awaiting_write"
            ? i18n.t("ui.pvp.your_turn_write")
            : i18n.t("ui.pvp.your_turn_guess")
          : i18n.t("ui.pvp.waiting");
    return el(
      "div",
      { class: "match-card" },
      el(
        "div",
        { class: "match-line" },
        el("span", { class: "vs", text: names }),
        open,
      ),
      el("div", { class: "match-state", text: stateText }),
    );
  }

  private async createMatch(opts: { vsBot?: boolean; opponentHandle?: string }): Promise<void> {
    const { api, state } = this.ctx;
    try {
      const match = await api.createMatch({ ...opts, language: state.language });
      state.activeMatchId = match.match_id;
      this.ctx.rerender();
    } catch (error) {
      this.ctx.showError(error);
    }
  }

  // ---- one match -----------------------------------------------------------

  private async renderMatch(wrap: HTMLElement, matchId: string): Promise<void> {
    const { api } = this.ctx;
    let match: MatchView;
    try {
      match = await api.viewMatch(matchId);
    } catch (error) {
      this.ctx.showError(error);
      this.ctx.state.activeMatchId = null;
      this.ctx.rerender();
      return;
    }
    this.renderMatchView(wrap, match);
  }

  private renderMatchView(wrap: HTMLElement, match: MatchView): void {
    const { i18n, state } = this.ctx;
    clear(wrap);

    const back = el("button", { class: "pvp-back", text: `← ${i18n.t("ui.pvp.title")}` });
    back.addEventListener("click", () => {
      state.activeMatchId = null;
      this.ctx.rerender();
    });
    wrap.appendChild(back);

    const names = match.players.map((p) => p.handle).join(" · ");
    wrap.appendChild(el("h1", { text: names }));

    const card = el("div", { class: "match-card", "data-match-version": String(match.version) });
    wrap.appendChild(card);

    for (const exchange of match.exchanges) {
      if (!exchange.argument_id && exchange.writer !== this.myId()) continue;
      card.appendChild(this.exchangeRow(match, exchange));
    }

    if (match.state === "finished") {
      card.appendChild(el("div", { class: "match-state", text: i18n.t("ui.pvp.finished") }));
      return;
    }
    if (!match.your_turn) {
      card.appendChild(el("div", { class: "match-state", text: i18n.t("ui.pvp.waiting") }));
      return;
    }
    if (match.state === "awaiting_write") card.appendChild(this.writeBox(match));
    else card.appendChild(this.guessBox(match));
  }

  private exchangeRow(match: MatchView, exchange: MatchView["exchanges"][number]): HTMLElement {
    const { i18n } = this.ctx;
    const writer = match.players.find((p) => p.user_id === exchange.writer);
    const row = el("div", { class: "exchange" });
    row.appendChild(el("div", { class: "who", text: writer?.handle ?? exchange.writer }));
    if (exchange.argument_text) {
      row.appendChild(el("div", { class: "text", text: `“${exchange.argument_text}”` }));
    }
    if (exchange.guess !== null) {
      const guessedName = i18n.t(`fallacy.${exchange.guess}.name`);
      const truthName = exchange.assigned_type
        ? i18n.t(`fallacy.${exchange.assigned_type}.name`)
        : "";
      const right = exchange.guess_correct === true;
      row.appendChild(
        el("div", {
          class: right ? "verdict right" : "verdict wrong",
          text: `${i18n.t("ui.pvp.guess")}: ${guessedName} — ${i18n.t("ui.pvp.reveal")} ${truthName}`,
        }),
      );
    } else if (exchange.assigned_type && exchange.writer === this.myId()) {
      // Writer-only hint: the secret target type for the argument in flight.
      row.appendChild(
        el("div", {
          class: "verdict",
          text: i18n.t(`fallacy.${exchange.assigned_type}.name`),
        }),
      );
    }
    return row;
  }

  private writeBox(match: MatchView): HTMLElement {
    const { i18n } = this.ctx;
    const pending = match.exchanges[match.exchanges.length - 1];
    const box = el("div", { class: "turn-box" });
    box.appendChild(el("h3", { text: i18n.t("ui.pvp.your_turn_write") }));
    if (pending?.assigned_type) {
      box.appendChild(
        el("div", {
          class: "secret-type",
          text: i18n.t(`fallacy.${pending.assigned_type}.name`),
        }),
      );
    }
    const textarea = el("textarea", { id: "pvp-text" });
    const submit = el("button", { id: "pvp-submit", text: i18n.t("ui.round.submit") });
    submit.addEventListener("click", () => {
      submit.disabled = true;
      void this.sendTurn(match, textarea.value);
    });
    box.appendChild(textarea);
    box.appendChild(el("div", { class: "actions" }, submit));
    return box;
  }

  private guessBox(match: MatchView): HTMLElement {
    const { i18n } = this.ctx;
    const box = el("div", { class: "turn-box" });
    box.appendChild(el("h3", { text: i18n.t("ui.pvp.your_turn_guess") }));
    const grid = el("div", { class: "guess-grid" });
    for (const code of ALL_LABELS) {
      const button = el("button", {
        "data-label": code,
        text: i18n.t(`fallacy.${code}.name`),
      });
      button.addEventListener("click", () => {
        for (const b of grid.querySelectorAll("button")) b.disabled = true;
        void this.sendGuess(match, code);
      });
      grid.appendChild(button);
    }
    box.appendChild(grid);
    return box;
  }

  private async sendTurn(match: MatchView, text: string): Promise<void> {
    const { api, state } = this.ctx;
    try {
      await api.submitTurn(match.match_id, match.version, text);
      state.activeMatchId = match.match_id;
      this.ctx.rerender();
    } catch (error) {
      this.handleTurnError(error);
    }
  }

  private async sendGuess(match: MatchView, guess: FallacyCode): Promise<void> {
    const { api, i18n } = this.ctx;
    try {
      const view = await api.submitMatchGuess(match.match_id, match.version, guess);
      if (view.feedback) {
        const title = view.feedback.correct
          ? i18n.t("feedback.hard_correct")
          : i18n.t("feedback.hard_wrong");
        const truth = i18n.t(`fallacy.${view.feedback.assigned_type}.name`);
        await this.ctx.modal(title, [`${i18n.t("ui.pvp.reveal")} ${truth}`]);
        if (view.feedback.reward > 0) {
          this.ctx.toast(`+${view.feedback.reward} ${i18n.t("ui.round.points")}`);
        }
      }
      await this.ctx.refreshAccount();
      this.ctx.rerender();
    } catch (error) {
      this.handleTurnError(error);
    }
  }

  /** Stale view or lost race: silently re-fetch; real errors surface. */
  private handleTurnError(error: unknown): void {
    if (
      error instanceof ApiError &&
      (error.code === "version_conflict" || error.code === "not_your_turn")
    ) {
      this.ctx.rerender();
      return;
    }
    this.ctx.showError(error);
    this.ctx.rerender();
  }

  private myId(): string {
    return this.ctx.state.user?.user_id ?? "";
  }
}
