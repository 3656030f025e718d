/** Two sessions race to edit the same leaf: exactly one commit, exactly
 * one conflict prompt, no silent overwrite. */

import { describe, expect, it } from "vitest";

import { GridSession } from "../src/grid.js";
import type { AssessmentDoc } from "../src/types.js";
import { client, rawJson } from "./helpers.js";

describe("concurrent editing", () => {
  it("admits one write and prompts the loser with both revisions", async () => {
    const alpha = new GridSession(client());
    const beta = new GridSession(client());
    await alpha.load("nvidia");
    await beta.load("nvidia");
    expect(alpha.token).toBe(beta.token);

    alpha.beginEdit("1.1.1");
    alpha.setScore(75);
    alpha.setRationale("Literature coverage broadened.");
    beta.beginEdit("1.1.1");
    beta.setScore(90);
    beta.setRationale("Comprehensive taxonomy references.");

    const outcomes = await Promise.all([alpha.commit(), beta.commit()]);
    expect([...outcomes].sort()).toEqual(["committed", "conflict"]);

    const winner = outcomes[0] === "committed" ? alpha : beta;
    const loser = winner === alpha ? beta : alpha;
    const winningScore = winner === alpha ? 75 : 90;
    const losingScore = winner === alpha ? 90 : 75;

    // the committed revision is what the service serves
    const doc = await rawJson<AssessmentDoc>("/assessments/nvidia");
    const entry = doc.entries.find((e) => e.id === "1.1.1")!;
    expect(entry.score).toBe(winningScore);

    // the loser sees both revisions and no silent overwrite happened
    const prompt = loser.view().conflict;
    expect(prompt).toBeDefined();
    expect(prompt!.criterionId).toBe("1.1.1");
    expect(prompt!.mine.score).toBe(losingScore);
    expect(prompt!.theirs?.score).toBe(winningScore);

    // the loser's leaf stays marked dirty until resolution
    expect(loser.view().rows.find((r) => r.id === "1.1.1")?.dirty).toBe(true);

    // resolving by retry re-bases on the winner's revision and commits
    await loser.resolveConflict("retry");
    const final = await rawJson<AssessmentDoc>("/assessments/nvidia");
    expect(final.entries.find((e) => e.id === "1.1.1")!.score).toBe(losingScore);
    expect(loser.view().conflict).toBeUndefined();
    expect(loser.view().rows.find((r) => r.id === "1.1.1")?.dirty).toBe(false);
  });

  it("a stale write cannot slip through after an intervening commit", async () => {
    const early = new GridSession(client());
    await early.load("magic");
    const lateToken = early.token;

    early.beginEdit("2.2.4");
    early.setScore(50);
    early.setRationale("Pause policy spelled out.");
    expect(await early.commit()).toBe("committed");

    const stale = new GridSession(client());
    await stale.load("magic");
    stale.token = lateToken; // simulate a tab that read before the commit
    stale.beginEdit("2.2.4");
    stale.setScore(75);
    stale.setRationale("Stale buffer.");
    expect(await stale.commit()).toBe("conflict");

    const doc = await rawJson<AssessmentDoc>("/assessments/magic");
    expect(doc.entries.find((e) => e.id === "2.2.4")!.score).toBe(50);
  });
});
