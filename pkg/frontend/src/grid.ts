/** Scoring grid: rubric tree rows against one or more assessment columns.
 *
 * The grid never aggregates. Every number it shows is copied verbatim out
 * of a service response: leaf scores from assessment documents, interior
 * and total cells from score reports. Edits buffer locally (dirty) until
 * the service confirms the write; a stale token turns into a conflict
 * prompt carrying both revisions.
 */

import { Client, Conflict } from "./api.js";
import type {
  AssessmentDoc,
  EntryDoc,
  EvidenceDoc,
  ReportDoc,
  RubricDoc,
  RubricNodeDoc,
} from "./types.js";

export interface EditBuffer {
  criterionId: string;
  score: number;
  rationale: string;
  evidence: EvidenceDoc[];
  improvements?: string;
}

export interface ConflictPrompt {
  criterionId: string;
  mine: EditBuffer;
  theirs: EntryDoc | undefined;
  theirToken: string;
}

export interface ComparisonColumn {
  key: string;
  label: string;
  report: ReportDoc;
  doc?: AssessmentDoc;
}

export interface GridCell {
  column: string;
  /** Verbatim service value, stringified for the DOM. */
  text: string;
  sourceNodeId: string;
}

export interface GridRow {
  id: string;
  title: string;
  depth: number;
  kind: "total" | "dimension" | "section" | "leaf";
  expanded: boolean;
  visible: boolean;
  dirty: boolean;
  cells: GridCell[];
}

export interface GridView {
  columns: string[];
  rows: GridRow[];
  conflict?: ConflictPrompt;
  editing?: EditBuffer;
}

function walk(node: RubricNodeDoc, depth: number,
              out: { node: RubricNodeDoc; depth: number }[]): void {
  out.push({ node, depth });
  for (const child of node.children) walk(child, depth + 1, out);
}

export class GridSession {
  rubric!: RubricDoc;
  assessmentId!: string;
  doc!: AssessmentDoc;
  token!: string;
  report!: ReportDoc;
  comparisons: ComparisonColumn[] = [];
  expanded = new Set<string>();
  dirty = new Set<string>();
  editing?: EditBuffer;
  conflict?: ConflictPrompt;

  constructor(readonly client: Client) {}

  async load(assessmentId: string): Promise<void> {
    this.rubric = await this.client.getRubric();
    const { doc, token } = await this.client.getAssessment(assessmentId);
    this.assessmentId = assessmentId;
    this.doc = doc;
    this.token = token;
    this.report = await this.client.getReport(assessmentId);
    for (const dim of this.rubric.dimensions) this.expanded.add(dim.id);
    this.dirty.clear();
    this.editing = undefined;
    this.conflict = undefined;
  }

  /** The score picker offers exactly the rubric's scale points. */
  pickerOptions(): number[] {
    return [...this.rubric.scale.points];
  }

  async addComparison(peerId: string): Promise<void> {
    const report = await this.client.getReport(peerId);
    this.comparisons.push({ key: peerId, label: report.subject, report });
  }

  async addBestInClassColumn(): Promise<void> {
    const report = await this.client.bestInClass();
    this.comparisons.push({ key: "bestinclass", label: report.subject, report });
  }

  toggle(nodeId: string): void {
    if (this.expanded.has(nodeId)) this.expanded.delete(nodeId);
    else this.expanded.add(nodeId);
  }

  entry(criterionId: string): EntryDoc | undefined {
    return this.doc.entries.find((e) => e.id === criterionId);
  }

  beginEdit(criterionId: string): EditBuffer {
    const current = this.entry(criterionId);
    this.editing = {
      criterionId,
      score: current?.score ?? this.rubric.scale.points[0],
      rationale: current?.rationale ?? "",
      evidence: current ? [...current.evidence] : [],
      improvements: current?.improvements,
    };
    return this.editing;
  }

  setScore(score: number): void {
    if (!this.editing) throw new Error("no leaf is being edited");
    if (!this.rubric.scale.points.includes(score)) {
      throw new Error(`score ${score} is not a scale point`);
    }
    this.editing.score = score;
    this.dirty.add(this.editing.criterionId);
  }

  setRationale(rationale: string): void {
    if (!this.editing) throw new Error("no leaf is being edited");
    this.editing.rationale = rationale;
    this.dirty.add(this.editing.criterionId);
  }

  addEvidence(item: EvidenceDoc): void {
    if (!this.editing) throw new Error("no leaf is being edited");
    this.editing.evidence.push(item);
    this.dirty.add(this.editing.criterionId);
  }

  /** PUT the buffered edit; on success refresh the document and the whole
   * report so ancestor cells show the service's recomputed values. */
  async commit(): Promise<"committed" | "conflict"> {
    if (!this.editing) throw new Error("no leaf is being edited");
    const buffer = this.editing;
    try {
      this.token = await this.client.putLeaf(this.assessmentId, buffer.criterionId, {
        score: buffer.score,
        rationale: buffer.rationale,
        evidence: buffer.evidence,
        improvements: buffer.improvements,
        expected_token: this.token,
      });
    } catch (error) {
      if (error instanceof Conflict) {
        const fresh = await this.client.getAssessment(this.assessmentId);
        this.conflict = {
          criterionId: buffer.criterionId,
          mine: buffer,
          theirs: fresh.doc.entries.find((e) => e.id === buffer.criterionId),
          theirToken: fresh.token,
        };
        return "conflict";
      }
      throw error;
    }
    const fresh = await this.client.getAssessment(this.assessmentId);
    this.doc = fresh.doc;
    this.token = fresh.token;
    this.report = await this.client.getReport(this.assessmentId);
    this.dirty.delete(buffer.criterionId);
    this.editing = undefined;
    return "committed";
  }

  /** Resolve a conflict by re-basing the buffered edit on the other
   * session's revision and retrying, or by dropping the buffer. */
  async resolveConflict(action: "retry" | "discard"): Promise<void> {
    if (!this.conflict) throw new Error("no conflict to resolve");
    const { mine, theirToken } = this.conflict;
    if (action === "discard") {
      const fresh = await this.client.getAssessment(this.assessmentId);
      this.doc = fresh.doc;
      this.token = fresh.token;
      this.report = await this.client.getReport(this.assessmentId);
      this.dirty.delete(mine.criterionId);
      this.editing = undefined;
      this.conflict = undefined;
      return;
    }
    this.token = theirToken;
    this.editing = mine;
    this.conflict = undefined;
    await this.commit();
  }

  view(): GridView {
    const flattened: { node: RubricNodeDoc; depth: number }[] = [];
    for (const dim of this.rubric.dimensions) walk(dim, 0, flattened);

    const columns: ComparisonColumn[] = [
      { key: this.assessmentId, label: this.report.subject, report: this.report, doc: this.doc },
      ...this.comparisons,
    ];

    const displayByColumn = new Map<string, Map<string, number>>();
    for (const column of columns) {
      const map = new Map<string, number>();
      for (const node of column.report.nodes) map.set(node.id, node.display);
      displayByColumn.set(column.key, map);
    }

    const rows: GridRow[] = [];
    rows.push({
      id: "total",
      title: "Total score",
      depth: 0,
      kind: "total",
      expanded: true,
      visible: true,
      dirty: false,
      cells: columns.map((column) => ({
        column: column.key,
        text: String(column.report.total.display),
        sourceNodeId: "total",
      })),
    });
    for (const { node, depth } of flattened) {
      const isLeaf = node.children.length === 0;
      const parents = node.id.split(".");
      let visible = true;
      for (let i = 1; i < parents.length; i += 1) {
        if (!this.expanded.has(parents.slice(0, i).join("."))) visible = false;
      }
      rows.push({
        id: node.id,
        title: node.title,
        depth,
        kind: isLeaf ? "leaf" : depth === 0 ? "dimension" : "section",
        expanded: this.expanded.has(node.id),
        visible,
        dirty: this.dirty.has(node.id),
        cells: columns.map((column) => ({
          column: column.key,
          text: String(displayByColumn.get(column.key)!.get(node.id)),
          sourceNodeId: node.id,
        })),
      });
    }
    return {
      columns: columns.map((c) => c.label),
      rows,
      conflict: this.conflict,
      editing: this.editing,
    };
  }

  leafRowCount(): number {
    return this.view().rows.filter((row) => row.kind === "leaf").length;
  }
}
