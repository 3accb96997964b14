import { describe, expect, it } from "vitest";

import {
  fieldsFor,
  isValidAtom,
  parseIndicator,
  parsePermutation,
  parsePositions,
  validateParams,
} from "../src/validate.js";

describe("atom and indicator syntax", () => {
  it("accepts plain atoms and rejects bad spellings", () => {
    expect(isValidAtom("reader_init")).toBe(true);
    expect(isValidAtom("x2")).toBe(true);
    expect(isValidAtom("123bad")).toBe(false);
    expect(isValidAtom("Upper")).toBe(false);
    expect(isValidAtom("")).toBe(false);
    expect(isValidAtom("has space")).toBe(false);
  });

  it("parses optionally qualified indicators", () => {
    expect(parseIndicator("m1:p/2")).toEqual({
      module: "m1",
      name: "p",
      arity: 2,
    });
    expect(parseIndicator("p/0")).toEqual({
      module: null,
      name: "p",
      arity: 0,
    });
    expect(parseIndicator("p")).toBeNull();
    expect(parseIndicator("M:p/1")).toBeNull();
  });
});

describe("permutations and positions", () => {
  it("requires a complete permutation for the arity", () => {
    expect(parsePermutation("2,1,3", 3)).toEqual([2, 1, 3]);
    expect(parsePermutation("1,2", 3)).toBeNull();
    expect(parsePermutation("1,1,3", 3)).toBeNull();
    expect(parsePermutation("0,1,2", 3)).toBeNull();
    expect(parsePermutation("3,2,1", 3)).toEqual([3, 2, 1]);
  });

  it("bounds positions by the arity", () => {
    expect(parsePositions("2", 2)).toEqual([2]);
    expect(parsePositions("1,2", 2)).toEqual([1, 2]);
    expect(parsePositions("3", 2)).toBeNull();
    expect(parsePositions("", 2)).toBeNull();
  });
});

describe("parameter dialogs per suggestion kind", () => {
  it("prefills extraction parameters from the candidate payload", () => {
    const fields = fieldsFor({
      kind: "common-sequence",
      target: "2 occurrences",
      payload: { params: ["Stream", "State"] },
    });
    expect(fields).toHaveLength(1);
    expect(fields[0]!.label).toContain("Stream, State");
  });

  it("rejects an invalid extraction name", () => {
    const suggestion = {
      kind: "common-sequence",
      target: "",
      payload: { params: [] },
    };
    const bad = validateParams(suggestion, { name: "123bad" });
    expect(bad.ok).toBe(false);
    expect(bad.errors["name"]).toContain("not a valid atom");
    const good = validateParams(suggestion, { name: "read_next_state" });
    expect(good.ok).toBe(true);
    expect(good.params).toEqual({ name: "read_next_state" });
  });

  it("keeps duplicate-group keeps within the group", () => {
    const suggestion = {
      kind: "duplicate-group",
      target: "",
      payload: { members: ["m1:p/1", "m2:p/1"] },
    };
    expect(validateParams(suggestion, { keep: "m3:p/1" }).ok).toBe(false);
    expect(validateParams(suggestion, { keep: "m1:p/1" }).ok).toBe(true);
  });

  it("only == and =:= are offered for unification weakening", () => {
    const suggestion = {
      kind: "unification-as-test",
      target: "",
      payload: {},
    };
    expect(validateParams(suggestion, { test: "=" }).ok).toBe(false);
    expect(validateParams(suggestion, { test: "=:=" }).params).toEqual({
      test: "=:=",
    });
  });

  it("kinds without decisions need no form", () => {
    expect(fieldsFor({ kind: "dead-code", target: "", payload: {} }))
      .toEqual([]);
    expect(fieldsFor({ kind: "cut-replaceable", target: "", payload: {} }))
      .toEqual([]);
  });
});
