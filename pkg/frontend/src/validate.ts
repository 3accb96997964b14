// Client-side validation for the parameter dialogs. Mirrors the wire
// formats the service accepts; the server still has the final say.

const ATOM_RE = /^[a-z][a-zA-Z0-9_]*$/;
const INDICATOR_RE = /^(?:([a-z][a-zA-Z0-9_]*):)?([a-z][a-zA-Z0-9_]*)\/(\d+)$/;

export function isValidAtom(name: string): boolean {
  return ATOM_RE.test(name);
}

export interface Indicator {
  module: string | null;
  name: string;
  arity: number;
}

export function parseIndicator(text: string): Indicator | null {
  const match = INDICATOR_RE.exec(text.trim());
  if (!match) {
    return null;
  }
  return {
    module: match[1] ?? null,
    name: match[2]!,
    arity: parseInt(match[3]!, 10),
  };
}

export function parsePermutation(text: string, arity: number): number[] | null {
  const parts = text.split(",").map((p) => p.trim()).filter((p) => p.length);
  if (parts.length !== arity) {
    return null;
  }
  const values = parts.map((p) => parseInt(p, 10));
  if (values.some((v) => Number.isNaN(v))) {
    return null;
  }
  const sorted = [...values].sort((a, b) => a - b);
  for (let i = 0; i < arity; i++) {
    if (sorted[i] !== i + 1) {
      return null;
    }
  }
  return values;
}

export function parsePositions(text: string, arity: number): number[] | null {
  const parts = text.split(",").map((p) => p.trim()).filter((p) => p.length);
  if (!parts.length) {
    return null;
  }
  const values = parts.map((p) => parseInt(p, 10));
  if (values.some((v) => Number.isNaN(v) || v < 1 || v > arity)) {
    return null;
  }
  return values;
}

export interface FieldSpec {
  key: string;
  label: string;
  placeholder: string;
  prefill?: string;
}

export interface SuggestionLike {
  kind: string;
  target: string;
  payload: Record<string, unknown>;
}

// Which suggestion kinds need user parameters before previewing, and what
// the dialog should ask for.
export function fieldsFor(suggestion: SuggestionLike): FieldSpec[] {
  switch (suggestion.kind) {
    case "common-sequence": {
      const params = (suggestion.payload["params"] as string[]) ?? [];
      return [
        {
          key: "name",
          label: `predicate name (parameters: ${params.join(", ") || "none"})`,
          placeholder: "extracted_goal",
        },
      ];
    }
    case "duplicate-group": {
      const members = (suggestion.payload["members"] as string[]) ?? [];
      return [
        {
          key: "keep",
          label: `member to keep (${members.join(", ")})`,
          placeholder: members[0] ?? "module:name/arity",
          prefill: members[0],
        },
      ];
    }
    case "unification-as-test":
      return [
        {
          key: "test",
          label: "replacement test (== or =:=)",
          placeholder: "==",
          prefill: "==",
        },
      ];
    default:
      return [];
  }
}

export interface ValidationResult {
  ok: boolean;
  errors: Record<string, string>;
  params: Record<string, unknown>;
}

export function validateParams(
  suggestion: SuggestionLike,
  values: Record<string, string>,
): ValidationResult {
  const errors: Record<string, string> = {};
  const params: Record<string, unknown> = {};
  switch (suggestion.kind) {
    case "common-sequence": {
      const name = (values["name"] ?? "").trim();
      if (!isValidAtom(name)) {
        errors["name"] = `${name || "(empty)"} is not a valid atom`;
      } else {
        params["name"] = name;
      }
      break;
    }
    case "duplicate-group": {
      const keep = (values["keep"] ?? "").trim();
      const indicator = parseIndicator(keep);
      if (!indicator) {
        errors["keep"] = "expected module:name/arity";
      } else {
        const members = (suggestion.payload["members"] as string[]) ?? [];
        if (!members.includes(keep)) {
          errors["keep"] = "must be one of the group members";
        } else {
          params["keep"] = keep;
        }
      }
      break;
    }
    case "unification-as-test": {
      const test = (values["test"] ?? "==").trim();
      if (test !== "==" && test !== "=:=") {
        errors["test"] = "test must be == or =:=";
      } else {
        params["test"] = test;
      }
      break;
    }
  }
  return { ok: Object.keys(errors).length === 0, errors, params };
}
