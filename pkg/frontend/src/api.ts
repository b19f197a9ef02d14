/** Thin client for the query service endpoints. */

import type { CaseInfo, ImagePoint, QueryResult } from "./types.js";

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") {
      return body.detail;
    }
  } catch {
    // non-JSON error body
  }
  return `${response.status} ${response.statusText}`;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  async listCases(): Promise<CaseInfo[]> {
    const response = await fetch(`${this.base}/api/cases`);
    if (!response.ok) {
      throw new Error(`cannot list cases: ${await errorDetail(response)}`);
    }
    return (await response.json()) as CaseInfo[];
  }

  imageUrl(caseId: string): string {
    return `${this.base}/api/image/${encodeURIComponent(caseId)}`;
  }

  async query(caseId: string, click: ImagePoint, m: number): Promise<QueryResult> {
    const response = await fetch(`${this.base}/api/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ case_id: caseId, click: { x: click.x, y: click.y }, m }),
    });
    if (!response.ok) {
      throw new Error(`query failed: ${await errorDetail(response)}`);
    }
    return (await response.json()) as QueryResult;
  }
}
