/** Wire types mirroring the service's canonical JSON, field for field. */

export interface ScaleDoc {
  points: number[];
  anchors: Record<string, string>;
}

export interface RubricNodeDoc {
  id: string;
  title: string;
  weight: number;
  guidance: string[];
  rule?: { kind: string; verifier: string };
  children: RubricNodeDoc[];
}

export interface RubricDoc {
  version: string;
  scale: ScaleDoc;
  dimensions: RubricNodeDoc[];
}

export interface EvidenceDoc {
  quote: string;
  location: string;
  note?: string;
}

export interface EntryDoc {
  id: string;
  score: number;
  rationale: string;
  evidence: EvidenceDoc[];
  improvements?: string;
  status: string;
}

export interface AssessmentDoc {
  subject: {
    company: string;
    framework_title: string;
    framework_version: string;
    assessment_date?: string;
    source_url?: string;
  };
  rubric_version: string;
  partial?: boolean;
  entries: EntryDoc[];
  published?: Record<string, number>;
  published_variants?: Record<string, number[]>;
}

export interface ExactDoc {
  num: number;
  den: number;
  decimal: string;
}

export interface NodeScoreDoc {
  id: string;
  exact: ExactDoc;
  display: number;
}

export interface ReportDoc {
  subject: string;
  rubric_version: string;
  nodes: NodeScoreDoc[];
  total: { exact: ExactDoc; display: number };
}

export interface WhatIfDoc {
  overrides: Record<string, number>;
  report: ReportDoc;
  total_delta: ExactDoc;
  dimension_deltas: Record<string, ExactDoc>;
}

export interface AssessmentListing {
  id: string;
  company: string;
  framework_title: string;
  token: string;
}

export interface LeafWrite {
  score: number;
  rationale: string;
  evidence?: EvidenceDoc[];
  improvements?: string;
  status?: string;
  expected_token: string;
}
