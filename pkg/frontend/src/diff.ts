// Line-based model of a unified diff. Rendering works from the diff text
// alone; the client never re-parses Prolog.

export type DiffLineKind =
  | "file"
  | "hunk"
  | "add"
  | "del"
  | "context"
  | "meta";

export interface DiffLine {
  kind: DiffLineKind;
  text: string;
  oldNo: number | null;
  newNo: number | null;
}

export interface DiffFile {
  oldPath: string;
  newPath: string;
  lines: DiffLine[];
  additions: number;
  deletions: number;
}

const HUNK_RE = /^@@ -(\d+)(?:,\d+)? \+(\d+)(?:,\d+)? @@/;

export function parseUnifiedDiff(text: string): DiffFile[] {
  const files: DiffFile[] = [];
  let current: DiffFile | null = null;
  let oldNo = 0;
  let newNo = 0;

  const lines = text.length ? text.replace(/\n$/, "").split("\n") : [];
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!;
    if (line.startsWith("--- ")) {
      const next = lines[i + 1] ?? "";
      if (next.startsWith("+++ ")) {
        current = {
          oldPath: stripPrefix(line.slice(4)),
          newPath: stripPrefix(next.slice(4)),
          lines: [
            { kind: "file", text: line, oldNo: null, newNo: null },
            { kind: "file", text: next, oldNo: null, newNo: null },
          ],
          additions: 0,
          deletions: 0,
        };
        files.push(current);
        i++;
        continue;
      }
    }
    if (current === null) {
      continue;
    }
    const hunk = HUNK_RE.exec(line);
    if (hunk) {
      oldNo = parseInt(hunk[1]!, 10);
      newNo = parseInt(hunk[2]!, 10);
      current.lines.push({ kind: "hunk", text: line, oldNo: null, newNo: null });
      continue;
    }
    if (line.startsWith("+")) {
      current.lines.push({ kind: "add", text: line, oldNo: null, newNo: newNo });
      newNo += 1;
      current.additions += 1;
    } else if (line.startsWith("-")) {
      current.lines.push({ kind: "del", text: line, oldNo: oldNo, newNo: null });
      oldNo += 1;
      current.deletions += 1;
    } else if (line.startsWith(" ") || line === "") {
      current.lines.push({
        kind: "context",
        text: line,
        oldNo: oldNo,
        newNo: newNo,
      });
      oldNo += 1;
      newNo += 1;
    } else {
      current.lines.push({ kind: "meta", text: line, oldNo: null, newNo: null });
    }
  }
  return files;
}

function stripPrefix(path: string): string {
  if (path.startsWith("a/") || path.startsWith("b/")) {
    return path.slice(2);
  }
  return path;
}

export function diffStats(files: DiffFile[]): {
  files: number;
  additions: number;
  deletions: number;
} {
  return {
    files: files.length,
    additions: files.reduce((n, f) => n + f.additions, 0),
    deletions: files.reduce((n, f) => n + f.deletions, 0),
  };
}
