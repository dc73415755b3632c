/** Level play: serves write/recognize rounds and shows server feedback.
 *
 * The screen never judges anything itself. Rewards, correctness, and gold
 * labels are rendered verbatim from the submit response; soft feedback
 * deliberately shows no correctness cue because none exists yet.
 */

import type { Feedback, RecognizeRound, RoundPayload, SubmitResult, WriteRound } from "../api";
import type { AppContext } from "../context";
import { clear, el, injectStyles } from "../dom";

const CSS = `
  .round-wrap{max-width:640px;margin:0 auto;padding:16px;}
  .round-head{display:flex;justify-content:space-between;align-items:baseline;
    font-size:12px;opacity:0.65;margin-bottom:14px;letter-spacing:1px;}
  .round-card{border:1px solid #3c3a57;border-radius:10px;background:#23223a;padding:20px;}
  .round-card h2{margin:0 0 10px;font-size:16px;}
  .topic-box{border-left:3px solid #6c5ce7;padding:6px 12px;margin:12px 0;
    background:#1a1930;border-radius:0 6px 6px 0;}
  .topic-box .topic-title{font-weight:600;}
  .topic-box .topic-desc{font-size:13px;opacity:0.7;margin-top:2px;}
  .assigned-type{margin:12px 0;padding:10px 12px;border-radius:6px;background:#2d2b49;}
  .assigned-type .type-name{font-weight:700;color:#ffeaa7;}
  .assigned-type .type-desc{font-size:13px;opacity:0.8;margin-top:4px;}
  .round-card textarea{width:100%;box-sizing:border-box;min-height:110px;margin-top:8px;
    padding:10px;border-radius:6px;border:1px solid #4a4868;background:#1a1930;
    color:inherit;font:inherit;resize:vertical;}
  .char-count{font-size:12px;opacity:0.6;text-align:right;margin-top:4px;}
  .char-count.out-of-range{color:#ff7675;opacity:1;}
  .argument-quote{font-size:15px;line-height:1.6;padding:12px;background:#1a1930;
    border-radius:6px;margin:12px 0;font-style:italic;}
  .label-grid{display:grid;grid-template-columns:1fr 1fr;gap:8px;margin-top:12px;}
  .label-grid button{padding:10px;border-radius:6px;border:1px solid #4a4868;cursor:pointer;
    background:#2d2b49;color:inherit;font:inherit;font-size:13px;}
  .label-grid button:hover{border-color:#6c5ce7;}
  .round-actions{margin-top:16px;display:flex;gap:10px;}
  .round-actions button{padding:10px 22px;border-radius:6px;border:none;cursor:pointer;
    background:#6c5ce7;color:#fff;font:inherit;font-weight:600;}
  .round-actions button:disabled{background:#4a4868;cursor:not-allowed;}
`;

export class RoundScreen {
  constructor(private readonly ctx: AppContext) {}

  render(container: HTMLElement): void {
    injectStyles("round-styles", CSS);
    clear(container);
    const session = this.ctx.state.session;
    if (!session) {
      this.ctx.go("map");
      return;
    }
    const wrap = el("div", { class: "round-wrap" });
    container.appendChild(wrap);
    if (session.state === "completed") {
      this.renderFinish(wrap);
      return;
    }
    void this.loadRound(wrap);
  }

  private async loadRound(wrap: HTMLElement): Promise<void> {
    const { api, state } = this.ctx;
    if (!state.session) return;
    try {
      const payload = await api.currentRound(state.session.session_id);
      if ("error" in payload) {
        // Content pool ran dry for this rater; nothing playable right now.
        wrap.appendChild(el("p", { text: this.ctx.i18n.t("error.content_exhausted") }));
        return;
      }
      this.renderRound(wrap, payload);
    } catch (error) {
      this.ctx.showError(error);
    }
  }

  private renderRound(wrap: HTMLElement, round: RoundPayload): void {
    clear(wrap);
    wrap.appendChild(
      el(
        "div",
        { class: "round-head" },
        el("span", { text: round.session_id }),
        el("span", { text: `${round.cursor + 1} / ${round.total_rounds}` }),
      ),
    );
    const card = el("div", { class: "round-card", "data-round-kind": round.kind });
    wrap.appendChild(card);
    if (round.kind === "write_fallacy") this.renderWrite(card, round);
    else this.renderRecognize(card, round);
  }

  // ---- write rounds -------------------------------------------------------

  private renderWrite(card: HTMLElement, round: WriteRound): void {
    const { i18n } = this.ctx;
    card.appendChild(el("h2", { text: i18n.t("ui.round.write_prompt") }));
    card.appendChild(
      el(
        "div",
        { class: "topic-box" },
        el("div", { class: "topic-title", text: round.topic.title }),
        el("div", { class: "topic-desc", text: round.topic.description }),
      ),
    );
    card.appendChild(
      el(
        "div",
        { class: "assigned-type" },
        el("div", {
          class: "type-name",
          text: i18n.t(`fallacy.${round.assigned_type}.name`),
        }),
        el("div", { class: "type-desc", text: round.assigned_type_description }),
      ),
    );

    const textarea = el("textarea", { id: "round-text" });
    const counter = el("div", { class: "char-count" });
    const submit = el("button", { id: "round-submit", text: i18n.t("ui.round.submit") });
    const { min_chars, max_chars } = round.limits;

    const sync = () => {
      const length = textarea.value.length;
      counter.textContent = `${length} / ${max_chars}`;
      const ok = length >= min_chars && length <= max_chars;
      counter.className = ok ? "char-count" : "char-count out-of-range";
      submit.disabled = !ok;
    };
    textarea.addEventListener("input", sync);
    sync();

    submit.addEventListener("click", () => {
      submit.disabled = true;
      void this.submitText(round, textarea.value);
    });

    card.appendChild(el("label", { for: "round-text", text: i18n.t("ui.round.your_argument") }));
    card.appendChild(textarea);
    card.appendChild(counter);
    card.appendChild(el("div", { class: "round-actions" }, submit));
  }

  private async submitText(round: WriteRound, text: string): Promise<void> {
    const { api, state } = this.ctx;
    if (!state.session) return;
    try {
      const result = await api.submitText(state.session.session_id, round.round_id, text);
      await this.afterSubmit(result);
    } catch (error) {
      this.ctx.showError(error);
      this.ctx.rerender();
    }
  }

  // ---- recognition rounds -------------------------------------------------

  private renderRecognize(card: HTMLElement, round: RecognizeRound): void {
    const { i18n } = this.ctx;
    card.appendChild(el("h2", { text: i18n.t("ui.round.recognize_prompt") }));
    card.appendChild(
      el(
        "div",
        { class: "topic-box" },
        el("div", {
          class: "topic-title",
          text: `${i18n.t("ui.round.topic")}: ${round.argument.topic_title}`,
        }),
      ),
    );
    card.appendChild(el("blockquote", { class: "argument-quote", text: round.argument.text }));

    const grid = el("div", { class: "label-grid" });
    for (const code of round.candidate_labels) {
      const button = el("button", {
        "data-label": code,
        text: i18n.t(`fallacy.${code}.name`),
      });
      button.addEventListener("click", () => {
        for (const b of grid.querySelectorAll("button")) b.disabled = true;
        void this.submitGuess(round, code);
      });
      grid.appendChild(button);
    }
    card.appendChild(grid);
  }

  private async submitGuess(
    round: RecognizeRound,
    code: RecognizeRound["candidate_labels"][number],
  ): Promise<void> {
    const { api, state } = this.ctx;
    if (!state.session) return;
    try {
      const result = await api.submitGuess(state.session.session_id, round.round_id, code);
      await this.afterSubmit(result);
    } catch (error) {
      this.ctx.showError(error);
      this.ctx.rerender();
    }
  }

  // ---- feedback and progression -------------------------------------------

  private async afterSubmit(result: SubmitResult): Promise<void> {
    const { i18n, state } = this.ctx;
    state.session = result.session;
    if (result.reward > 0) {
      this.ctx.toast(`+${result.reward} ${i18n.t("ui.round.points")}`);
    }
    await this.showFeedback(result.feedback);
    this.ctx.rerender();
  }

  private showFeedback(feedback: Feedback): Promise<void> {
    const { i18n } = this.ctx;
    if (feedback.kind === "soft") {
      // Provisional outcome: the crowd has not judged this item yet, so the
      // dialog must not hint at right or wrong.
      return this.ctx.modal(i18n.t(feedback.explanation_key), []);
    }
    const title = feedback.correct
      ? i18n.t("feedback.hard_correct")
      : i18n.t("feedback.hard_wrong");
    const goldName = i18n.t(`fallacy.${feedback.gold_label}.name`);
    return this.ctx.modal(title, [
      `${i18n.t("ui.round.gold_label")}: ${goldName}`,
      feedback.explanation,
    ]);
  }

  private renderFinish(wrap: HTMLElement): void {
    const { i18n } = this.ctx;
    const finish = el("button", { id: "round-finish", text: i18n.t("ui.round.finish") });
    finish.addEventListener("click", () => void this.finishLevel());
    wrap.appendChild(
      el(
        "div",
        { class: "round-card" },
        el("h2", { text: i18n.t("ui.round.finish") }),
        el("div", { class: "round-actions" }, finish),
      ),
    );
  }

  private async finishLevel(): Promise<void> {
    const { api, state } = this.ctx;
    if (!state.session) return;
    try {
      await api.finishLevel(state.session.session_id);
      state.session = null;
      await this.ctx.refreshAccount();
      this.ctx.go("map");
    } catch (error) {
      this.ctx.showError(error);
    }
  }
}
