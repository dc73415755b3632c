/** Application shell: top bar, screen switching, toasts, modals, polling. */

import { ApiClient, ApiError, type Notification } from "./api";
import type { AppContext } from "./context";
import { clear, el, injectStyles } from "./dom";
import { Translator } from "./i18n";
import { Poller } from "./poller";
import { AuthScreen } from "./screens/auth";
import { LeaderboardScreen } from "./screens/leaderboard";
import { MapScreen } from "./screens/map";
import { PvpScreen } from "./screens/pvp";
import { RoundScreen } from "./screens/round";
import { initialState, persisted, type ClientState, type ScreenName } from "./state";

const SUPPORTED_LANGUAGES = ["en", "de"];

const CSS = `
  body{margin:0;background:#14132a;color:#e8e6f5;
    font:15px/1.5 "Segoe UI",system-ui,sans-serif;}
  .topbar{display:flex;align-items:center;gap:14px;padding:10px 18px;
    background:#1c1b33;border-bottom:1px solid #34324e;flex-wrap:wrap;}
  .topbar .brand{font-weight:700;letter-spacing:1px;}
  .topbar nav{display:flex;gap:6px;flex:1;}
  .topbar nav button{padding:6px 12px;border-radius:6px;border:none;cursor:pointer;
    background:transparent;color:inherit;font:inherit;font-size:13px;}
  .topbar nav button.active{background:#6c5ce7;color:#fff;}
  .topbar .points{font-size:13px;opacity:0.8;}
  .topbar select{padding:5px 8px;border-radius:6px;border:1px solid #4a4868;
    background:#1a1930;color:inherit;font:inherit;font-size:13px;}
  .topbar .logout{padding:6px 12px;border-radius:6px;border:1px solid #4a4868;
    cursor:pointer;background:transparent;color:inherit;font:inherit;font-size:13px;}
  .note-badge{min-width:18px;text-align:center;border-radius:9px;background:#e17055;
    color:#fff;font-size:11px;padding:1px 5px;display:inline-block;}
  #screen{padding-bottom:60px;}
  .toast-stack{position:fixed;bottom:16px;right:16px;display:flex;flex-direction:column;
    gap:8px;z-index:950;}
  .toast{padding:10px 16px;border-radius:8px;background:#2d2b49;border:1px solid #4a4868;
    box-shadow:0 4px 14px rgba(0,0,0,0.4);font-size:14px;animation:toast-in 0.15s ease-out;}
  @keyframes toast-in{from{transform:translateY(8px);opacity:0;}to{transform:none;opacity:1;}}
  .modal-backdrop{position:fixed;inset:0;background:rgba(8,7,20,0.7);z-index:990;
    display:flex;align-items:center;justify-content:center;padding:20px;}
  .modal-box{max-width:420px;width:100%;background:#23223a;border:1px solid #4a4868;
    border-radius:12px;padding:22px;}
  .modal-box h2{margin:0 0 12px;font-size:17px;}
  .modal-box .modal-line{margin:8px 0;font-size:14px;line-height:1.5;}
  .modal-box .modal-close{margin-top:16px;padding:9px 22px;border-radius:6px;border:none;
    cursor:pointer;background:#6c5ce7;color:#fff;font:inherit;font-weight:600;}
`;

export class App implements AppContext {
  readonly api: ApiClient;
  readonly i18n = new Translator();
  readonly state: ClientState = initialState();

  private root!: HTMLElement;
  private screenHost!: HTMLElement;
  private topbar!: HTMLElement;
  private toastStack!: HTMLElement;
  private poller: Poller | null = null;
  private seenNotifications = new Set<string>();

  constructor(api?: ApiClient) {
    this.api = api ?? new ApiClient();
  }

  // ---- bootstrap ------------------------------------------------------------

  async mount(root: HTMLElement): Promise<void> {
    injectStyles("app-styles", CSS);
    this.root = root;
    clear(root);
    this.topbar = el("header", { class: "topbar" });
    this.screenHost = el("main", { id: "screen" });
    this.toastStack = el("div", { class: "toast-stack" });
    root.append(this.topbar, this.screenHost, this.toastStack);

    this.state.language = persisted.loadLanguage();
    if (!SUPPORTED_LANGUAGES.includes(this.state.language)) this.state.language = "en";
    await this.i18n.activate(this.api, this.state.language);

    const token = persisted.loadToken();
    if (token) {
      this.api.setToken(token);
      this.state.token = token;
      try {
        await this.refreshAccount();
        this.state.screen = "map";
        this.onAuthChanged();
      } catch {
        // expired or revoked: fall back to the sign-in screen
        this.api.setToken(null);
        this.state.token = null;
        persisted.saveToken(null);
      }
    }
    this.rerender();
  }

  // ---- AppContext -----------------------------------------------------------

  go(screen: ScreenName): void {
    this.state.screen = screen;
    if (screen !== "pvp") this.state.activeMatchId = null;
    this.rerender();
  }

  rerender(): void {
    this.renderTopbar();
    clear(this.screenHost);
    const screen = this.currentScreen();
    screen.render(this.screenHost);
  }

  toast(text: string): void {
    const note = el("div", { class: "toast", text });
    this.toastStack.appendChild(note);
    setTimeout(() => note.remove(), 3500);
  }

  modal(title: string, body: (string | Node)[]): Promise<void> {
    return new Promise((resolve) => {
      const backdrop = el("div", { class: "modal-backdrop" });
      const box = el("div", { class: "modal-box", role: "dialog" });
      box.appendChild(el("h2", { text: title }));
      for (const line of body) {
        box.appendChild(el("div", { class: "modal-line" }, line));
      }
      const close = el("button", { class: "modal-close", text: "OK" });
      close.addEventListener("click", () => {
        backdrop.remove();
        resolve();
      });
      box.appendChild(close);
      backdrop.appendChild(box);
      this.root.appendChild(backdrop);
    });
  }

  async refreshAccount(): Promise<void> {
    this.state.user = await this.api.me();
    this.state.progression = await this.api.worlds();
    this.renderTopbar();
  }

  onAuthChanged(): void {
    this.poller?.stop();
    this.poller = null;
    if (!this.state.token) return;
    this.poller = new Poller(() => this.pollNotifications());
    this.poller.start();
  }

  /** Stop background work (page teardown, test cleanup). */
  shutdown(): void {
    this.poller?.stop();
    this.poller = null;
  }

  showError(error: unknown): void {
    if (error instanceof ApiError) {
      const text = this.i18n.has(error.messageKey)
        ? this.i18n.t(error.messageKey)
        : error.message;
      this.toast(text);
      if (error.code === "invalid_token" || error.code === "token_expired") {
        void this.signOut();
      }
      return;
    }
    this.toast(this.i18n.t("error.network"));
  }

  // ---- internals ------------------------------------------------------------

  private currentScreen(): { render(host: HTMLElement): void } {
    switch (this.state.screen) {
      case "auth":
        return new AuthScreen(this);
      case "map":
        return new MapScreen(this);
      case "round":
        return new RoundScreen(this);
      case "pvp":
        return new PvpScreen(this);
      case "leaderboard":
        return new LeaderboardScreen(this);
    }
  }

  private renderTopbar(): void {
    clear(this.topbar);
    const { i18n, state } = this;
    this.topbar.appendChild(el("span", { class: "brand", text: i18n.t("ui.app.title") }));

    if (state.user) {
      const nav = el("nav", {});
      const tabs: [ScreenName, string][] = [
        ["map", i18n.t("ui.map.title")],
        ["pvp", i18n.t("ui.pvp.title")],
        ["leaderboard", i18n.t("ui.leaderboard.title")],
      ];
      for (const [name, label] of tabs) {
        const button = el("button", {
          class: state.screen === name ? "active" : "",
          "data-nav": name,
          text: label,
        });
        if (name === "pvp" && state.unreadNotifications > 0) {
          button.appendChild(el("span", { class: "note-badge", text: String(state.unreadNotifications) }));
        }
        button.addEventListener("click", () => this.go(name));
        nav.appendChild(button);
      }
      this.topbar.appendChild(nav);
      this.topbar.appendChild(
        el("span", {
          class: "points",
          text: `${state.user.handle} · ${state.user.total_points} ${i18n.t("ui.round.points")}`,
        }),
      );
    } else {
      this.topbar.appendChild(el("nav", {}));
    }

    const picker = el("select", { id: "language-picker", "aria-label": i18n.t("ui.auth.language") });
    for (const lang of SUPPORTED_LANGUAGES) {
      const option = el("option", { value: lang, text: lang });
      if (lang === state.language) option.selected = true;
      picker.appendChild(option);
    }
    picker.addEventListener("change", () => void this.setLanguage(picker.value));
    this.topbar.appendChild(picker);

    if (state.user) {
      const logout = el("button", { class: "logout", text: i18n.t("ui.auth.logout") });
      logout.addEventListener("click", () => void this.signOut());
      this.topbar.appendChild(logout);
    }
  }

  async setLanguage(language: string): Promise<void> {
    if (!SUPPORTED_LANGUAGES.includes(language)) return;
    await this.i18n.activate(this.api, language);
    this.state.language = language;
    persisted.saveLanguage(language);
    this.rerender();
  }

  async signOut(): Promise<void> {
    try {
      await this.api.logout();
    } catch {
      // server unreachable: drop the token locally anyway
    }
    this.api.setToken(null);
    this.state.token = null;
    this.state.user = null;
    this.state.progression = null;
    this.state.session = null;
    this.state.activeMatchId = null;
    persisted.saveToken(null);
    this.onAuthChanged();
    this.go("auth");
  }

  /** Poll task: true = something new arrived (keeps the fast cadence). */
  private async pollNotifications(): Promise<boolean> {
    if (!this.state.token) return false;
    const { notifications } = await this.api.notifications();
    const unread = notifications.filter((n) => !n.read);
    const fresh = unread.filter((n) => !this.seenNotifications.has(n.id));
    for (const note of fresh) {
      this.seenNotifications.add(note.id);
      this.toast(this.notificationText(note));
    }
    const count = unread.length;
    if (count !== this.state.unreadNotifications) {
      this.state.unreadNotifications = count;
      this.renderTopbar();
    }
    if (fresh.length > 0 && unread.length > 0) {
      await this.api.markNotificationsRead(unread.map((n) => n.id));
    }
    return fresh.length > 0;
  }

  private notificationText(note: Notification): string {
    const key = `ui.notifications.${note.kind}`;
    return this.i18n.has(key) ? this.i18n.t(key) : this.i18n.t("ui.notifications.title");
  }
}
