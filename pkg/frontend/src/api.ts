/** Typed client for the scoring service. All aggregate values displayed by
 * the workbench originate in these responses; nothing is computed here. */

import type {
  AssessmentDoc,
  AssessmentListing,
  LeafWrite,
  ReportDoc,
  RubricDoc,
  WhatIfDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly currentToken?: string,
  ) {
    super(message);
  }
}

export class Conflict extends ApiError {}

export interface AssessmentWithToken {
  doc: AssessmentDoc;
  token: string;
}

async function fail(response: Response): Promise<never> {
  let message = `${response.status}`;
  let currentToken: string | undefined;
  try {
    const body = (await response.json()) as { error?: string; current_token?: string };
    if (body.error) message = body.error;
    currentToken = body.current_token;
  } catch {
    // non-JSON error body; keep the status text
  }
  if (response.status === 409) throw new Conflict(409, message, currentToken);
  throw new ApiError(response.status, message);
}

export class Client {
  constructor(
    readonly baseUrl: string,
    readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  getRubric(): Promise<RubricDoc> {
    return this.getJson<RubricDoc>("/rubric");
  }

  listAssessments(): Promise<AssessmentListing[]> {
    return this.getJson<AssessmentListing[]>("/assessments");
  }

  async getAssessment(id: string): Promise<AssessmentWithToken> {
    const response = await this.fetchImpl(`${this.baseUrl}/assessments/${id}`);
    if (!response.ok) await fail(response);
    const token = (response.headers.get("etag") ?? "").replaceAll('"', "");
    return { doc: (await response.json()) as AssessmentDoc, token };
  }

  getReport(id: string): Promise<ReportDoc> {
    return this.getJson<ReportDoc>(`/assessments/${id}/report`);
  }

  bestInClass(): Promise<ReportDoc> {
    return this.getJson<ReportDoc>("/bestinclass");
  }

  async putLeaf(id: string, criterionId: string, write: LeafWrite): Promise<string> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/assessments/${id}/leaves/${criterionId}`,
      {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(write),
      },
    );
    if (!response.ok) await fail(response);
    const body = (await response.json()) as { token: string };
    return body.token;
  }

  async whatIf(id: string, overrides: Record<string, number>): Promise<WhatIfDoc> {
    const response = await this.fetchImpl(`${this.baseUrl}/whatif`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ assessment: id, overrides }),
    });
    if (!response.ok) await fail(response);
    return (await response.json()) as WhatIfDoc;
  }
}
