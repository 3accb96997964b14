// View state and the transitions behind the refactoring browser. Kept free
// of DOM concerns so the behavior is testable headless.

import { ApiClient, ApiError, PreviewResponse, Suggestion } from "./api.js";

export interface Toast {
  kind: "info" | "error";
  message: string;
}

export interface PreviewState extends PreviewResponse {
  suggestionId: string;
  stale: boolean;
  accepted: boolean; // semantics-change checkbox
  inlineError: string | null;
}

export interface ViewState {
  connected: boolean;
  version: number;
  suggestions: Suggestion[];
  kindFilter: string | null;
  selectedId: string | null;
  sourceContext: string | null;
  preview: PreviewState | null;
  toasts: Toast[];
  files: string[];
}

export type Listener = (state: ViewState) => void;

export class Store {
  state: ViewState = {
    connected: false,
    version: 0,
    suggestions: [],
    kindFilter: null,
    selectedId: null,
    sourceContext: null,
    preview: null,
    toasts: [],
    files: [],
  };

  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private patch(changes: Partial<ViewState>): void {
    this.state = { ...this.state, ...changes };
    this.emit();
  }

  toast(kind: Toast["kind"], message: string): void {
    this.patch({ toasts: [...this.state.toasts, { kind, message }] });
  }

  async refresh(): Promise<void> {
    try {
      const [project, response] = await Promise.all([
        this.api.project(),
        this.api.suggestions(),
      ]);
      const preview = this.state.preview
        ? {
            ...this.state.preview,
            stale: this.state.preview.version !== response.version,
          }
        : null;
      const selected = response.suggestions.some(
        (s) => s.id === this.state.selectedId,
      )
        ? this.state.selectedId
        : null;
      this.patch({
        connected: true,
        version: response.version,
        suggestions: response.suggestions,
        files: project.files,
        preview,
        selectedId: selected,
      });
    } catch (err) {
      this.patch({ connected: false });
      throw err instanceof ApiError ? err : new Error(String(err));
    }
  }

  visibleSuggestions(): Suggestion[] {
    const filter = this.state.kindFilter;
    return this.state.suggestions.filter(
      (s) => filter === null || s.kind === filter,
    );
  }

  groups(): Map<string, Suggestion[]> {
    const groups = new Map<string, Suggestion[]>();
    for (const s of this.visibleSuggestions()) {
      const list = groups.get(s.kind) ?? [];
      list.push(s);
      groups.set(s.kind, list);
    }
    return groups;
  }

  kindCounts(): Map<string, number> {
    const counts = new Map<string, number>();
    for (const s of this.state.suggestions) {
      counts.set(s.kind, (counts.get(s.kind) ?? 0) + 1);
    }
    return counts;
  }

  setFilter(kind: string | null): void {
    this.patch({ kindFilter: kind });
  }

  async select(id: string | null): Promise<void> {
    this.patch({ selectedId: id, preview: null, sourceContext: null });
    if (id === null) {
      return;
    }
    const suggestion = this.state.suggestions.find((s) => s.id === id);
    if (!suggestion) {
      return;
    }
    try {
      const source = await this.api.source(suggestion.span.file);
      const context = extractContext(source, suggestion.span.start,
                                     suggestion.span.end);
      this.patch({ sourceContext: context });
    } catch {
      this.patch({ sourceContext: null });
    }
  }

  selectedSuggestion(): Suggestion | null {
    return (
      this.state.suggestions.find((s) => s.id === this.state.selectedId) ?? null
    );
  }

  async preview(params: Record<string, unknown> = {}): Promise<void> {
    const suggestion = this.selectedSuggestion();
    if (!suggestion) {
      return;
    }
    try {
      const response = await this.api.previewSuggestion(suggestion.id, params);
      this.patch({
        preview: {
          ...response,
          suggestionId: suggestion.id,
          stale: response.version !== this.state.version,
          accepted: false,
          inlineError: null,
        },
      });
    } catch (err) {
      if (err instanceof ApiError) {
        this.patch({
          preview: {
            preview_id: "",
            version: this.state.version,
            diff: "",
            semantics_flag: "preserving",
            annotations: [],
            suggestionId: suggestion.id,
            stale: false,
            accepted: false,
            inlineError: `${err.errorName}: ${err.message}`,
          },
        });
        return;
      }
      throw err;
    }
  }

  setAccepted(accepted: boolean): void {
    if (this.state.preview) {
      this.patch({ preview: { ...this.state.preview, accepted } });
    }
  }

  canApply(): boolean {
    const preview = this.state.preview;
    if (!preview || preview.stale || preview.inlineError) {
      return false;
    }
    if (preview.semantics_flag !== "preserving" && !preview.accepted) {
      return false;
    }
    return true;
  }

  async apply(): Promise<boolean> {
    const preview = this.state.preview;
    if (!preview || !this.canApply()) {
      return false;
    }
    try {
      const result = await this.api.apply(preview.preview_id, preview.accepted);
      this.toast("info", `applied; project is now at version ${result.new_version}`);
      this.patch({ preview: null, selectedId: null, sourceContext: null });
      await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.toast("error",
                   "the project changed under this preview; list refreshed");
        await this.refresh();
        return false;
      }
      if (err instanceof ApiError && err.status === 422) {
        this.patch({
          preview: { ...preview, inlineError: `${err.errorName}: ${err.message}` },
        });
        return false;
      }
      throw err;
    }
  }

  async reject(): Promise<void> {
    const suggestion = this.selectedSuggestion();
    if (!suggestion) {
      return;
    }
    await this.api.reject(suggestion.id);
    this.patch({
      suggestions: this.state.suggestions.filter((s) => s.id !== suggestion.id),
      selectedId: null,
      preview: null,
      sourceContext: null,
    });
  }
}

export function extractContext(
  source: string,
  start: number,
  end: number,
  margin = 2,
): string {
  const head = source.slice(0, start);
  const firstLine = head.split("\n").length;
  const lines = source.split("\n");
  const span = source.slice(start, end);
  const spanLines = span.split("\n").length;
  const from = Math.max(0, firstLine - 1 - margin);
  const to = Math.min(lines.length, firstLine - 1 + spanLines + margin);
  return lines
    .slice(from, to)
    .map((text, i) => `${String(from + i + 1).padStart(4)} | ${text}`)
    .join("\n");
}
