/**
 * Locale bundle cache and lookup.
 *
 * Bundles come from GET /api/locales/{language}; the client holds one active
 * bundle at a time and re-renders on switch. Lookups that miss are tracked in
 * `missingKeys` and rendered with unmistakable ⟦markers⟧ so an untranslated
 * screen fails loudly in tests instead of silently showing raw keys.
 */

import type { ApiClient, LocaleView } from "./api";

export class Translator {
  private entries: Record<string, string> = {};
  private active = "";
  private cache = new Map<string, Record<string, string>>();
  readonly missingKeys = new Set<string>();

  get language(): string {
    return this.active;
  }

  /** Install a bundle directly (tests, preloaded payloads). */
  install(view: LocaleView): void {
    this.cache.set(view.language, view.entries);
    this.entries = view.entries;
    this.active = view.language;
  }

  /** Fetch (or reuse) the bundle for `language` and make it active. */
  async activate(api: ApiClient, language: string): Promise<void> {
    const cached = this.cache.get(language);
    if (cached) {
      this.entries = cached;
      this.active = language;
      return;
    }
    this.install(await api.locale(language));
  }

  has(key: string): boolean {
    return key in this.entries;
  }

  /** Resolve `key`; `params` fill {placeholder} slots in the entry text. */
  t(key: string, params?: Record<string, string | number>): string {
    const entry = this.entries[key];
    if (entry === undefined) {
      this.missingKeys.add(key);
      return `⟦${key}⟧`;
    }
    if (!params) return entry;
    return entry.replace(/\{(\w+)\}/g, (whole, name: string) =>
      name in params ? String(params[name]) : whole,
    );
  }
}
