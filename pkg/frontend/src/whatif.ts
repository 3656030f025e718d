/** What-if sandbox: leaf overrides that never persist.
 *
 * Totals and deltas shown by the panel come straight out of the service's
 * what-if response; the client holds overrides and renders strings.
 */

import { Client } from "./api.js";
import type { ReportDoc, RubricDoc, WhatIfDoc } from "./types.js";

export interface WhatIfPanel {
  baseId: string;
  overrideCount: number;
  /** Service-provided decimals, verbatim. */
  totalDisplay: string;
  totalDeltaDecimal: string;
  dimensionDeltas: { id: string; decimal: string }[];
}

function leafIds(rubric: RubricDoc): string[] {
  const out: string[] = [];
  const visit = (node: RubricDoc["dimensions"][number]): void => {
    if (node.children.length === 0) out.push(node.id);
    for (const child of node.children) visit(child);
  };
  for (const dim of rubric.dimensions) visit(dim);
  return out;
}

export class WhatIfSession {
  overrides: Record<string, number> = {};
  lastResult?: WhatIfDoc;

  constructor(
    readonly client: Client,
    readonly rubric: RubricDoc,
    readonly baseId: string,
  ) {}

  setOverride(criterionId: string, score: number): void {
    if (!this.rubric.scale.points.includes(score)) {
      throw new Error(`score ${score} is not a scale point`);
    }
    this.overrides[criterionId] = score;
  }

  clear(): void {
    this.overrides = {};
    this.lastResult = undefined;
  }

  /** Adopt the best published practice at every leaf. The target scores
   * are the service's composite report values (leaf displays are exact). */
  async adoptBestInClassPreset(): Promise<void> {
    const composite: ReportDoc = await this.client.bestInClass();
    const leaves = new Set(leafIds(this.rubric));
    this.overrides = {};
    for (const node of composite.nodes) {
      if (leaves.has(node.id)) this.overrides[node.id] = node.display;
    }
  }

  async run(): Promise<WhatIfDoc> {
    this.lastResult = await this.client.whatIf(this.baseId, this.overrides);
    return this.lastResult;
  }

  panel(): WhatIfPanel {
    if (!this.lastResult) throw new Error("run the sandbox first");
    const result = this.lastResult;
    return {
      baseId: this.baseId,
      overrideCount: Object.keys(this.overrides).length,
      totalDisplay: String(result.report.total.display),
      totalDeltaDecimal: result.total_delta.decimal,
      dimensionDeltas: Object.entries(result.dimension_deltas)
        .sort(([a], [b]) => a.localeCompare(b, undefined, { numeric: true }))
        .map(([id, exact]) => ({ id, decimal: exact.decimal })),
    };
  }
}
