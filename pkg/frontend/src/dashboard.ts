/** Learning dashboard: per-document coverage bars from the progress route. */

import { GatewayClient } from "./api.js";
import type { ProgressReport } from "./types.js";

export interface CoverageBar {
  documentId: string;
  label: string;
  /** Bar width in percent, 0..100, rounded to one decimal. */
  percent: number;
  status: string;
}

export function coverageBars(report: ProgressReport): CoverageBar[] {
  return report.materials.map((m) => ({
    documentId: m.document_id,
    label: `${m.document_id} (${m.interaction_count} interactions)`,
    percent: Math.round(m.coverage * 1000) / 10,
    status: m.status,
  }));
}

export class DashboardController {
  report: ProgressReport | null = null;

  constructor(
    private client: GatewayClient,
    private courseId: string,
  ) {}

  async refresh(): Promise<CoverageBar[]> {
    this.report = await this.client.progress(this.courseId);
    return coverageBars(this.report);
  }

  get overallPercent(): number {
    if (!this.report) {
      return 0;
    }
    return Math.round(this.report.aggregate.coverage * 1000) / 10;
  }
}
