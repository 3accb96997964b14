// DOM rendering for the refactoring browser. Every apply is preceded by a
// rendered diff of the exact edit set the service will write.

import { Suggestion } from "./api.js";
import { diffStats, parseUnifiedDiff } from "./diff.js";
import { Store, ViewState } from "./state.js";
import { fieldsFor, validateParams } from "./validate.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

export function mount(root: HTMLElement, store: Store): void {
  store.subscribe((state) => render(root, store, state));
  void store.refresh().catch(() => {
    render(root, store, store.state);
  });
}

function render(root: HTMLElement, store: Store, state: ViewState): void {
  root.textContent = "";
  root.append(header(store, state));
  if (!state.connected) {
    root.append(connectionBanner(store));
    return;
  }
  const layout = el("div", "layout");
  layout.append(suggestionPane(store, state), detailPane(store, state));
  root.append(layout);
  root.append(toastArea(state));
}

function header(store: Store, state: ViewState): HTMLElement {
  const bar = el("header", "topbar");
  bar.append(el("h1", "", "plref refactoring browser"));
  const version = el("span", "version",
                     state.connected ? `project v${state.version}` : "offline");
  const refresh = el("button", "", "refresh");
  refresh.addEventListener("click", () => void store.refresh().catch(() => {}));
  bar.append(version, refresh);
  return bar;
}

function connectionBanner(store: Store): HTMLElement {
  const banner = el("div", "banner error");
  banner.append(el("span", "", "cannot reach the plref service"));
  const retry = el("button", "", "retry");
  retry.addEventListener("click", () => void store.refresh().catch(() => {}));
  banner.append(retry);
  return banner;
}

function suggestionPane(store: Store, state: ViewState): HTMLElement {
  const pane = el("section", "suggestions");
  pane.append(filterChips(store, state));
  const groups = store.groups();
  if (groups.size === 0) {
    pane.append(el("div", "empty",
                   state.suggestions.length === 0
                     ? "nothing to suggest: the project is clean"
                     : "no suggestions match this filter"));
    return pane;
  }
  for (const [kind, items] of groups) {
    const grouped = new Map<string, Suggestion[]>();
    for (const s of items) {
      const list = grouped.get(s.module) ?? [];
      list.push(s);
      grouped.set(s.module, list);
    }
    const section = el("div", "kind-group");
    section.append(el("h2", "", `${kind} (${items.length})`));
    for (const [module, rows] of grouped) {
      section.append(el("h3", "", module));
      for (const s of rows) {
        section.append(suggestionRow(store, state, s));
      }
    }
    pane.append(section);
  }
  return pane;
}

function filterChips(store: Store, state: ViewState): HTMLElement {
  const chips = el("div", "chips");
  const all = el("button", state.kindFilter === null ? "chip active" : "chip",
                 `all (${state.suggestions.length})`);
  all.addEventListener("click", () => store.setFilter(null));
  chips.append(all);
  for (const [kind, count] of store.kindCounts()) {
    const chip = el("button",
                    state.kindFilter === kind ? "chip active" : "chip",
                    `${kind} (${count})`);
    chip.addEventListener("click", () => store.setFilter(kind));
    chips.append(chip);
  }
  return chips;
}

function suggestionRow(store: Store, state: ViewState,
                       suggestion: Suggestion): HTMLElement {
  const row = el("div",
                 suggestion.id === state.selectedId ? "row selected" : "row");
  row.dataset["id"] = suggestion.id;
  row.append(el("div", "target", suggestion.target));
  row.append(el("div", "explanation", suggestion.explanation));
  row.addEventListener("click", () => void store.select(suggestion.id));
  return row;
}

function detailPane(store: Store, state: ViewState): HTMLElement {
  const pane = el("section", "detail");
  const suggestion = store.selectedSuggestion();
  if (!suggestion) {
    pane.append(el("div", "empty", "select a suggestion to preview its edit"));
    return pane;
  }
  pane.append(el("h2", "", suggestion.target));
  pane.append(el("p", "", suggestion.explanation));
  if (state.sourceContext) {
    const context = el("pre", "context");
    context.textContent = state.sourceContext;
    pane.append(context);
  }

  if (!state.preview) {
    pane.append(paramsForm(store, suggestion));
    return pane;
  }

  const preview = state.preview;
  if (preview.inlineError) {
    pane.append(el("div", "banner error", preview.inlineError));
    return pane;
  }
  if (preview.stale) {
    pane.append(el("div", "banner warn",
                   "this preview was computed for an older project version; "
                   + "re-open the suggestion"));
  }
  for (const note of preview.annotations) {
    pane.append(el("div", "banner note", note));
  }

  pane.append(diffView(preview.diff));

  const actions = el("div", "actions");
  if (preview.semantics_flag !== "preserving") {
    const label = el("label", "accept-change");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = preview.accepted;
    box.addEventListener("change", () => store.setAccepted(box.checked));
    label.append(
      box,
      el("span", "",
         ` this edit is flagged "${preview.semantics_flag}": I accept the `
         + "semantics change"),
    );
    actions.append(label);
  }
  const apply = el("button", "apply", "apply");
  apply.disabled = !store.canApply();
  apply.addEventListener("click", () => void store.apply());
  const reject = el("button", "reject", "reject");
  reject.addEventListener("click", () => void store.reject());
  actions.append(apply, reject);
  pane.append(actions);
  return pane;
}

function paramsForm(store: Store, suggestion: Suggestion): HTMLElement {
  const form = el("form", "params");
  const fields = fieldsFor(suggestion);
  const inputs = new Map<string, HTMLInputElement>();
  for (const field of fields) {
    const label = el("label", "", field.label);
    const input = el("input") as HTMLInputElement;
    input.name = field.key;
    input.placeholder = field.placeholder;
    if (field.prefill) {
      input.value = field.prefill;
    }
    inputs.set(field.key, input);
    label.append(input);
    const error = el("div", "field-error");
    error.dataset["for"] = field.key;
    form.append(label, error);
  }
  const go = el("button", "preview", "preview diff");
  go.addEventListener("click", (event) => {
    event.preventDefault();
    const values: Record<string, string> = {};
    for (const [key, input] of inputs) {
      values[key] = input.value;
    }
    const result = validateParams(suggestion, values);
    for (const field of fields) {
      const slot = form.querySelector<HTMLElement>(
        `[data-for="${field.key}"]`);
      if (slot) {
        slot.textContent = result.errors[field.key] ?? "";
      }
    }
    if (result.ok) {
      void store.preview(result.params);
    }
  });
  form.append(go);
  return form;
}

export function diffView(diff: string): HTMLElement {
  const container = el("div", "diff");
  const files = parseUnifiedDiff(diff);
  const stats = diffStats(files);
  container.append(el("div", "diff-stats",
                      `${stats.files} file(s), +${stats.additions} `
                      + `-${stats.deletions}`));
  for (const file of files) {
    const block = el("pre", "diff-file");
    for (const line of file.lines) {
      const span = el("span", `line ${line.kind}`);
      span.textContent = line.text + "\n";
      block.append(span);
    }
    container.append(block);
  }
  return container;
}

function toastArea(state: ViewState): HTMLElement {
  const area = el("div", "toasts");
  for (const toast of state.toasts.slice(-3)) {
    area.append(el("div", `toast ${toast.kind}`, toast.message));
  }
  return area;
}
