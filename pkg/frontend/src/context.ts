/** What every screen gets from the shell: services, state, and navigation. */

import type { ApiClient } from "./api";
import type { Translator } from "./i18n";
import type { ClientState, ScreenName } from "./state";

export interface AppContext {
  readonly api: ApiClient;
  readonly i18n: Translator;
  readonly state: ClientState;
  /** Switch screens and re-render. */
  go(screen: ScreenName): void;
  /** Re-render the current screen (after state changed in place). */
  rerender(): void;
  /** Transient bottom-corner note (rewards, turn alerts). */
  toast(text: string): void;
  /** Blocking dialog; resolves when dismissed. */
  modal(title: string, body: (string | Node)[]): Promise<void>;
  /** Refresh `state.user` and `state.progression` from the server. */
  refreshAccount(): Promise<void>;
  /** Called after sign-in/out to persist the token and reset polling. */
  onAuthChanged(): void;
  /** Surface an API failure in the UI via its locale key. */
  showError(error: unknown): void;
}
