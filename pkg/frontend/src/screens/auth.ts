/** Sign-in / registration screen. */

import { ApiError } from "../api";
import type { AppContext } from "../context";
import { clear, el, injectStyles } from "../dom";
import { persisted } from "../state";

const CSS = `
  .auth-wrap{max-width:360px;margin:60px auto;padding:28px;border:1px solid #3c3a57;
    border-radius:10px;background:#23223a;}
  .auth-wrap h1{margin:0 0 4px;font-size:22px;letter-spacing:1px;}
  .auth-wrap .tagline{margin:0 0 20px;font-size:13px;opacity:0.65;}
  .auth-wrap label{display:block;font-size:12px;text-transform:uppercase;
    letter-spacing:1px;opacity:0.7;margin:12px 0 4px;}
  .auth-wrap input{width:100%;box-sizing:border-box;padding:9px 10px;border-radius:6px;
    border:1px solid #4a4868;background:#1a1930;color:inherit;font:inherit;}
  .auth-actions{display:flex;gap:10px;margin-top:20px;}
  .auth-actions button{flex:1;padding:10px;border-radius:6px;border:none;cursor:pointer;
    font:inherit;font-weight:600;}
  .auth-actions .primary{background:#6c5ce7;color:#fff;}
  .auth-actions .secondary{background:transparent;color:inherit;border:1px solid #4a4868;}
  .auth-error{margin-top:14px;color:#ff7675;font-size:13px;min-height:18px;}
`;

export class AuthScreen {
  constructor(private readonly ctx: AppContext) {}

  render(container: HTMLElement): void {
    injectStyles("auth-styles", CSS);
    clear(container);
    const { i18n } = this.ctx;

    const handle = el("input", { id: "auth-handle", autocomplete: "username" });
    const password = el("input", {
      id: "auth-password",
      type: "password",
      autocomplete: "current-password",
    });
    const errorLine = el("div", { class: "auth-error", id: "auth-error" });

    const loginBtn = el("button", { class: "primary", text: i18n.t("ui.auth.login") });
    const registerBtn = el("button", {
      class: "secondary",
      text: i18n.t("ui.auth.register"),
    });
    loginBtn.addEventListener("click", () => void this.submit(false, handle, password, errorLine));
    registerBtn.addEventListener("click", () =>
      void this.submit(true, handle, password, errorLine),
    );

    container.appendChild(
      el(
        "div",
        { class: "auth-wrap" },
        el("h1", { text: i18n.t("ui.app.title") }),
        el("p", { class: "tagline", text: i18n.t("ui.app.tagline") }),
        el("label", { for: "auth-handle", text: i18n.t("ui.auth.handle") }),
        handle,
        el("label", { for: "auth-password", text: i18n.t("ui.auth.password") }),
        password,
        el("div", { class: "auth-actions" }, loginBtn, registerBtn),
        errorLine,
      ),
    );
  }

  private async submit(
    asNewAccount: boolean,
    handle: HTMLInputElement,
    password: HTMLInputElement,
    errorLine: HTMLElement,
  ): Promise<void> {
    errorLine.textContent = "";
    const { api, i18n, state } = this.ctx;
    try {
      const auth = asNewAccount
        ? await api.register(handle.value.trim(), password.value)
        : await api.login(handle.value.trim(), password.value);
      api.setToken(auth.token);
      state.token = auth.token;
      state.user = auth.user;
      persisted.saveToken(auth.token);
      this.ctx.onAuthChanged();
      await this.ctx.refreshAccount();
      this.ctx.go("map");
    } catch (error) {
      if (error instanceof ApiError && i18n.has(error.messageKey)) {
        errorLine.textContent = i18n.t(error.messageKey);
      } else if (error instanceof ApiError) {
        errorLine.textContent = error.message;
      } else {
        errorLine.textContent = i18n.t("error.network");
      }
    }
  }
}
