// End-to-end acceptance: the browser logic against a live plref service on
// the reader fixture, cross-checked against the CLI for diff identity.

import { execFile, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Store } from "../src/state.js";

const execFileAsync = promisify(execFile);

const READER_SOURCE = `make_reader(File,Stream,State) :-
        open(File,read,Stream),
        read(Stream,Term),
        reader_code(Term,Stream,State).

reader_code(end_of_file,_,end_of_file) :- ! .
reader_code(Term,Stream,read(Term,Stream,Position)) :-
        stream_position(Stream,Position).

reader_done(end_of_file).

reader_next(Term,read(Term,Stream,Pos),State) :-
        stream_position(Stream,_,Pos),
        read(Stream,Next),
        reader_code(Next,Stream,State).
`;

const MANIFEST = `[files]
reader.pl
[roots]
make_reader/3
reader_done/1
reader_next/3
`;

const PORT = 7462;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let projectDir: string;
let manifestPath: string;

beforeAll(async () => {
  projectDir = mkdtempSync(join(tmpdir(), "plref-e2e-"));
  writeFileSync(join(projectDir, "reader.pl"), READER_SOURCE);
  manifestPath = join(projectDir, "project.plm");
  writeFileSync(manifestPath, MANIFEST);

  server = spawn("plref", ["-m", manifestPath, "serve", "--port", `${PORT}`], {
    stdio: "ignore",
  });
  for (let attempt = 0; attempt < 50; attempt++) {
    try {
      const response = await fetch(`${BASE}/api/project`);
      if (response.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("plref service did not come up");
}, 20_000);

afterAll(() => {
  server?.kill();
});

describe("refactoring browser against a live service", () => {
  it("walks the suggestion list to an applied cut-replaceable edit", async () => {
    const store = new Store(new ApiClient(BASE));
    await store.refresh();
    expect(store.state.connected).toBe(true);
    const initialVersion = store.state.version;

    const counts = store.kindCounts();
    expect(counts.get("cut-replaceable")).toBe(1);
    expect(counts.get("common-sequence")).toBe(1);

    const cut = store.state.suggestions.find(
      (s) => s.kind === "cut-replaceable",
    )!;
    expect(cut.target).toBe("user:reader_code/3");

    await store.select(cut.id);
    expect(store.state.sourceContext).toContain("reader_code");

    await store.preview();
    const preview = store.state.preview!;
    expect(preview.inlineError).toBeNull();
    expect(preview.stale).toBe(false);
    expect(preview.semantics_flag).toBe("preserving");

    // the preview diff is byte-identical to what the CLI prints
    const cli = await execFileAsync("plref", [
      "-m", manifestPath, "--dry-run", "cut2ite", "reader_code/3",
    ]);
    expect(preview.diff).toBe(cli.stdout);

    const applied = await store.apply();
    expect(applied).toBe(true);
    expect(store.state.version).toBe(initialVersion + 1);
    expect(
      store.state.suggestions.some((s) => s.id === cut.id),
    ).toBe(false);
  }, 20_000);

  it("rejecting a suggestion suppresses it without a version bump", async () => {
    const store = new Store(new ApiClient(BASE));
    await store.refresh();
    const before = store.state.version;
    const first = store.state.suggestions[0]!;
    await store.select(first.id);
    await store.reject();
    expect(store.state.suggestions.some((s) => s.id === first.id)).toBe(false);
    await store.refresh();
    expect(store.state.version).toBe(before);
    expect(store.state.suggestions.some((s) => s.id === first.id)).toBe(false);
  }, 20_000);
});
