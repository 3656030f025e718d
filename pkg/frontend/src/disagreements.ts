/** Rater-sheet review: sheets side by side, unresolved leaves highlighted.
 *
 * Detection is set comparison over locally loaded sheets; resolving a leaf
 * writes a reconciled entry through the service like any other edit.
 */

import { Client } from "./api.js";
import type { EvidenceDoc, RubricDoc } from "./types.js";

export interface RaterSheet {
  raterId: string;
  scores: Record<string, number>;
}

export interface DisagreementRow {
  criterionId: string;
  title: string;
  scores: Record<string, number>;
  unresolved: boolean;
}

function leafTitles(rubric: RubricDoc): Map<string, string> {
  const out = new Map<string, string>();
  const visit = (node: RubricDoc["dimensions"][number]): void => {
    if (node.children.length === 0) out.set(node.id, node.title);
    for (const child of node.children) visit(child);
  };
  for (const dim of rubric.dimensions) visit(dim);
  return out;
}

export class DisagreementView {
  resolved = new Set<string>();

  constructor(
    readonly client: Client,
    readonly rubric: RubricDoc,
    readonly assessmentId: string,
    readonly sheets: RaterSheet[],
  ) {
    if (sheets.length === 0) throw new Error("no rater sheets loaded");
    const first = Object.keys(sheets[0].scores).sort().join(",");
    for (const sheet of sheets) {
      if (Object.keys(sheet.scores).sort().join(",") !== first) {
        throw new Error("rater sheets cover different leaf sets");
      }
    }
  }

  rows(): DisagreementRow[] {
    const titles = leafTitles(this.rubric);
    const ids = Object.keys(this.sheets[0].scores)
      .sort((a, b) => a.localeCompare(b, undefined, { numeric: true }));
    return ids.map((criterionId) => {
      const scores: Record<string, number> = {};
      for (const sheet of this.sheets) scores[sheet.raterId] = sheet.scores[criterionId];
      const values = new Set(Object.values(scores));
      return {
        criterionId,
        title: titles.get(criterionId) ?? criterionId,
        scores,
        unresolved: values.size > 1 && !this.resolved.has(criterionId),
      };
    });
  }

  unresolvedIds(): string[] {
    return this.rows().filter((r) => r.unresolved).map((r) => r.criterionId);
  }

  /** Human resolution: write the agreed entry, mark the row settled. */
  async resolve(
    criterionId: string,
    score: number,
    rationale: string,
    expectedToken: string,
    evidence: EvidenceDoc[] = [],
  ): Promise<string> {
    const token = await this.client.putLeaf(this.assessmentId, criterionId, {
      score,
      rationale,
      evidence,
      status: "reconciled",
      expected_token: expectedToken,
    });
    this.resolved.add(criterionId);
    return token;
  }
}
