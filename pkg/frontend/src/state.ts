/**
 * Client-side session state: what the server told us most recently.
 *
 * This is a cache of server responses plus the auth token — never a second
 * source of truth. Screens read from it and the app layer overwrites slices
 * wholesale after each API call.
 */

import type { MatchView, ProgressionView, PublicUser, SessionView } from "./api";

export type ScreenName = "auth" | "map" | "round" | "pvp" | "leaderboard";

export interface ClientState {
  token: string | null;
  user: PublicUser | null;
  language: string;
  screen: ScreenName;
  progression: ProgressionView | null;
  session: SessionView | null;
  matches: MatchView[];
  activeMatchId: string | null;
  unreadNotifications: number;
}

export function initialState(): ClientState {
  return {
    token: null,
    user: null,
    language: "en",
    screen: "auth",
    progression: null,
    session: null,
    matches: [],
    activeMatchId: null,
    unreadNotifications: 0,
  };
}

const TOKEN_KEY = "fallacyarena.token";
const LANGUAGE_KEY = "fallacyarena.language";

/** localStorage wrapper that tolerates environments without storage. */
export const persisted = {
  loadToken(): string | null {
    try {
      return globalThis.localStorage?.getItem(TOKEN_KEY) ?? null;
    } catch {
      return null;
    }
  },
  saveToken(token: string | null): void {
    try {
      if (token === null) globalThis.localStorage?.removeItem(TOKEN_KEY);
      else globalThis.localStorage?.setItem(TOKEN_KEY, token);
    } catch {
      /* storage disabled: stay logged in for this page only */
    }
  },
  loadLanguage(): string {
    try {
      return globalThis.localStorage?.getItem(LANGUAGE_KEY) ?? "en";
    } catch {
      return "en";
    }
  },
  saveLanguage(language: string): void {
    try {
      globalThis.localStorage?.setItem(LANGUAGE_KEY, language);
    } catch {
      /* ignore */
    }
  },
};
