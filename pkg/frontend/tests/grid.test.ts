import { describe, expect, it } from "vitest";

import { GridSession } from "../src/grid.js";
import { client } from "./helpers.js";

describe("scoring grid", () => {
  it("renders exactly 65 leaf rows for the bundled rubric", async () => {
    const session = new GridSession(client());
    await session.load("anthropic");
    expect(session.leafRowCount()).toBe(65);
  });

  it("offers exactly the rubric's scale points in the score picker", async () => {
    const session = new GridSession(client());
    await session.load("anthropic");
    expect(session.pickerOptions()).toEqual([0, 10, 25, 50, 75, 90, 100]);
    session.beginEdit("1.1.1");
    expect(() => session.setScore(37)).toThrow(/not a scale point/);
  });

  it("collapsing a section hides its children without touching values", async () => {
    const session = new GridSession(client());
    await session.load("cohere");
    const before = session.view();
    const leaf = before.rows.find((r) => r.id === "1.1.1")!;
    expect(leaf.visible).toBe(false); // sections start collapsed
    session.toggle("1.1");
    const opened = session.view();
    expect(opened.rows.find((r) => r.id === "1.1.1")!.visible).toBe(true);
    expect(opened.rows.find((r) => r.id === "1.1.1")!.cells[0].text)
      .toBe(leaf.cells[0].text);
    session.toggle("1");
    const collapsed = session.view();
    expect(collapsed.rows.find((r) => r.id === "1.1")!.visible).toBe(false);
    expect(collapsed.rows.find((r) => r.id === "1.1.1")!.visible).toBe(false);
  });

  it("keeps a buffered edit visibly dirty until the service confirms it", async () => {
    const session = new GridSession(client());
    await session.load("g42");
    session.beginEdit("4.6.1");
    session.setScore(75);
    session.setRationale("External risk reporting commitments expanded.");
    expect(session.view().rows.find((r) => r.id === "4.6.1")!.dirty).toBe(true);
    expect(await session.commit()).toBe("committed");
    expect(session.view().rows.find((r) => r.id === "4.6.1")!.dirty).toBe(false);
  });
});
