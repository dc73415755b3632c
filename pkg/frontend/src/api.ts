/**
 * Typed fetch client for the game server.
 *
 * Every method mirrors one HTTP endpoint and returns the server payload
 * untouched: the client renders what the server decided and never computes
 * verdicts, rewards, or gold labels on its own. Non-2xx responses become
 * ApiError carrying the machine code and a locale key for display.
 */

export type FallacyCode =
  | "ad_hominem"
  | "appeal_to_emotion"
  | "red_herring"
  | "hasty_generalization"
  | "irrelevant_authority"
  | "no_fallacy";

export interface PublicUser {
  user_id: string;
  handle: string;
  avatar_id: string | null;
  roles: string[];
  total_points: number;
}

export interface AuthResponse {
  token: string;
  user: PublicUser;
}

export interface LevelSummary {
  id: string;
  completed: boolean;
  rounds: number;
}

export interface WorldView {
  id: string;
  title_key: string;
  theme: string;
  kind: "solo" | "pvp";
  unlocked: boolean;
  fog_fraction: number;
  levels: LevelSummary[];
}

export interface ProgressionView {
  worlds: WorldView[];
  total_points: number;
}

export interface SessionView {
  session_id: string;
  level_id: string;
  language: string;
  state: string;
  cursor: number;
  total_rounds: number;
}

export interface Topic {
  id: string;
  title: string;
  description: string;
}

export interface RoundBase {
  session_id: string;
  round_id: string;
  cursor: number;
  total_rounds: number;
}

export interface WriteRound extends RoundBase {
  kind: "write_fallacy";
  topic: Topic;
  assigned_type: FallacyCode;
  assigned_type_description: string;
  explanation_key: string;
  limits: { min_chars: number; max_chars: number };
}

export interface RecognizeRound extends RoundBase {
  kind: "recognize_fallacy";
  argument: {
    id: string;
    text: string;
    topic_id: string;
    topic_title: string;
  };
  candidate_labels: FallacyCode[];
}

export type RoundPayload = WriteRound | RecognizeRound;

export interface SoftFeedback {
  kind: "soft";
  explanation_key: string;
}

export interface HardFeedback {
  kind: "hard";
  correct: boolean;
  gold_label: FallacyCode;
  explanation_key: string;
  explanation: string;
}

export type Feedback = SoftFeedback | HardFeedback;

export interface SubmitResult {
  feedback: Feedback;
  reward: number;
  argument_id?: string;
  session: SessionView;
}

export interface FinishResult {
  level_id: string;
  world_id: string;
  fog_fraction: number;
  unlocked_worlds: string[];
}

export interface LeaderboardEntry {
  rank: number;
  user_id: string;
  handle: string;
  avatar_id: string | null;
  points: number;
}

export interface LeaderboardView {
  period: "all_time" | "weekly";
  rankings: LeaderboardEntry[];
  player_of_the_week: { user_id: string; handle: string; points: number } | null;
}

export interface LocaleView {
  language: string;
  entries: Record<string, string>;
}

export interface TopicsView {
  language: string;
  topics: Topic[];
  fallacy_descriptions: Record<string, string>;
}

export interface MatchPlayer {
  user_id: string;
  handle: string;
  is_bot: boolean;
}

export interface ExchangeView {
  writer: string;
  argument_id: string | null;
  argument_text: string | null;
  /** Only revealed to the writer, or to everyone once guessed. */
  assigned_type: FallacyCode | null;
  guess: FallacyCode | null;
  guess_correct: boolean | null;
}

export interface MatchView {
  match_id: string;
  topic_id: string;
  language: string;
  players: MatchPlayer[];
  state: "awaiting_write" | "awaiting_guess" | "finished";
  turn_owner: string;
  version: number;
  rounds_total: number;
  exchanges: ExchangeView[];
  your_turn: boolean;
  /** Present only on the response to a guess you just made. */
  feedback?: { correct: boolean; assigned_type: FallacyCode; reward: number };
}

export interface Notification {
  id: string;
  user_id: string;
  kind: string;
  match_id: string;
  created_at: string;
  read: boolean;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly messageKey: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = "/api",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  getToken(): string | null {
    return this.token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let payload: string | undefined;
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: payload,
    });
    const text = await response.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = null;
      }
    }
    if (!response.ok) {
      const record = (data ?? {}) as Record<string, string>;
      const code = record.code ?? "http_error";
      throw new ApiError(
        response.status,
        code,
        record.message ?? `request failed with status ${response.status}`,
        record.message_key ?? `error.${code}`,
      );
    }
    return data as T;
  }

  // ---- accounts -----------------------------------------------------------

  register(handle: string, password: string, avatarId?: string): Promise<AuthResponse> {
    return this.request("POST", "/register", {
      handle,
      password,
      avatar_id: avatarId ?? null,
    });
  }

  login(handle: string, password: string): Promise<AuthResponse> {
    return this.request("POST", "/login", { handle, password });
  }

  logout(): Promise<{ ok: boolean }> {
    return this.request("POST", "/logout", {});
  }

  me(): Promise<PublicUser> {
    return this.request("GET", "/me");
  }

  // ---- gameplay -----------------------------------------------------------

  worlds(): Promise<ProgressionView> {
    return this.request("GET", "/worlds");
  }

  startLevel(levelId: string, language: string): Promise<SessionView> {
    return this.request("POST", `/levels/${encodeURIComponent(levelId)}/start`, {
      language,
    });
  }

  currentRound(sessionId: string): Promise<RoundPayload | { error: string }> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/round`);
  }

  submitText(sessionId: string, roundId: string, text: string): Promise<SubmitResult> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/round`, {
      round_id: roundId,
      text,
    });
  }

  submitGuess(sessionId: string, roundId: string, guess: FallacyCode): Promise<SubmitResult> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/round`, {
      round_id: roundId,
      guess,
    });
  }

  finishLevel(sessionId: string): Promise<FinishResult> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/finish`, {});
  }

  leaderboard(period: "all" | "weekly"): Promise<LeaderboardView> {
    return this.request("GET", `/leaderboard?period=${period}`);
  }

  topics(language: string): Promise<TopicsView> {
    return this.request("GET", `/topics?language=${encodeURIComponent(language)}`);
  }

  locale(language: string): Promise<LocaleView> {
    return this.request("GET", `/locales/${encodeURIComponent(language)}`);
  }

  // ---- duels --------------------------------------------------------------

  createMatch(opts: {
    vsBot?: boolean;
    opponentHandle?: string;
    topicId?: string;
    language?: string;
  }): Promise<MatchView> {
    return this.request("POST", "/matches", {
      vs_bot: opts.vsBot ?? false,
      opponent_handle: opts.opponentHandle ?? null,
      topic_id: opts.topicId ?? null,
      language: opts.language ?? "en",
    });
  }

  listMatches(): Promise<{ matches: MatchView[] }> {
    return this.request("GET", "/matches");
  }

  viewMatch(matchId: string): Promise<MatchView> {
    return this.request("GET", `/matches/${encodeURIComponent(matchId)}`);
  }

  submitTurn(matchId: string, expectedVersion: number, text: string): Promise<MatchView> {
    return this.request("POST", `/matches/${encodeURIComponent(matchId)}/turn`, {
      expected_version: expectedVersion,
      text,
    });
  }

  submitMatchGuess(
    matchId: string,
    expectedVersion: number,
    guess: FallacyCode,
  ): Promise<MatchView> {
    return this.request("POST", `/matches/${encodeURIComponent(matchId)}/guess`, {
      expected_version: expectedVersion,
      guess,
    });
  }

  notifications(since?: string): Promise<{ notifications: Notification[] }> {
    const query = since ? `?since=${encodeURIComponent(since)}` : "";
    return this.request("GET", `/notifications${query}`);
  }

  markNotificationsRead(ids: string[]): Promise<{ marked: number }> {
    return this.request("POST", "/notifications/read", { ids });
  }

  // ---- moderation ---------------------------------------------------------

  reportArgument(argumentId: string, reason: string): Promise<unknown> {
    return this.request("POST", `/arguments/${encodeURIComponent(argumentId)}/report`, {
      reason,
    });
  }
}
