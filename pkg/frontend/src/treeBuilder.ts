// Tree-builder panel: submit asynchronous search jobs, poll until they
// finish, and browse the returned routes one at a time.
//
// The explorer never re-ranks anything: the gateway's route order is
// the displayed order, and filtering is exact string membership over
// the canonical SMILES the gateway returned.

import { GatewayClient } from './api';
import { CanvasGraph, routeToCanvas } from './canvas';
import type {
  GraphNodeDoc,
  JobRecordDoc,
  RouteMetricsDoc,
  SearchSettings,
} from './types';

export type Sleeper = (ms: number) => Promise<void>;

const defaultSleep: Sleeper = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export interface PollOptions {
  initialIntervalMs?: number;
  maxIntervalMs?: number;
  backoff?: number;
  timeoutMs?: number;
  sleep?: Sleeper;
}

export class TreeBuilderPanel {
  constructor(private readonly api: GatewayClient) {}

  submit(target: string, config?: SearchSettings) {
    return this.api.submitTreeSearch(target, config);
  }

  /** Poll a job with exponential backoff until it leaves `started`. */
  async waitForJob(jobId: string, options: PollOptions = {}): Promise<JobRecordDoc> {
    const {
      initialIntervalMs = 250,
      maxIntervalMs = 4000,
      backoff = 2,
      timeoutMs = 120_000,
      sleep = defaultSleep,
    } = options;
    let interval = initialIntervalMs;
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const record = await this.api.getResult(jobId);
      if (record.status !== 'started') {
        return record;
      }
      if (Date.now() >= deadline) {
        throw new Error(`job ${jobId} still running after ${timeoutMs}ms`);
      }
      await sleep(interval);
      interval = Math.min(interval * backoff, maxIntervalMs);
    }
  }

  listResults() {
    return this.api.listResults();
  }
}

function routeChemicals(doc: GraphNodeDoc, out: string[] = []): string[] {
  if (doc.type === 'chemical' && doc.smiles) out.push(doc.smiles);
  for (const child of doc.children) routeChemicals(child, out);
  return out;
}

function routeLeaves(doc: GraphNodeDoc, out: string[] = []): string[] {
  if (doc.type === 'chemical' && doc.children.length === 0 && doc.smiles) {
    out.push(doc.smiles);
  }
  for (const child of doc.children) routeLeaves(child, out);
  return out;
}

export class TreeExplorer {
  private routes: GraphNodeDoc[] = [];
  private visible: GraphNodeDoc[] = [];
  private index = 0;

  load(record: JobRecordDoc): void {
    if (record.status !== 'completed' || !record.result) {
      throw new Error(`job ${record.job_id} has no result to explore`);
    }
    this.routes = record.result.routes;
    this.visible = [...this.routes];
    this.index = 0;
  }

  count(): number {
    return this.visible.length;
  }

  current(): { route: GraphNodeDoc; metrics: RouteMetricsDoc | undefined; position: number } {
    if (this.visible.length === 0) throw new Error('no routes to display');
    const route = this.visible[this.index];
    return { route, metrics: route.metrics, position: this.index };
  }

  next(): void {
    if (this.index + 1 < this.visible.length) this.index += 1;
  }

  previous(): void {
    if (this.index > 0) this.index -= 1;
  }

  /** The gateway already returns routes sorted by the server-side rule
   * (length, then average plausibility, then average template score);
   * the sort control simply restores that order. */
  sortByServerRank(): GraphNodeDoc[] {
    this.visible = [...this.routes];
    this.index = 0;
    return this.visible;
  }

  /** Keep routes containing the given canonical SMILES anywhere. */
  filterByChemical(smiles: string): GraphNodeDoc[] {
    this.visible = this.routes.filter((route) =>
      routeChemicals(route).includes(smiles),
    );
    this.index = 0;
    return this.visible;
  }

  /** Keep routes whose starting materials include the given SMILES. */
  filterByStartingMaterial(smiles: string): GraphNodeDoc[] {
    this.visible = this.routes.filter((route) =>
      routeLeaves(route).includes(smiles),
    );
    this.index = 0;
    return this.visible;
  }

  clearFilter(): GraphNodeDoc[] {
    return this.sortByServerRank();
  }

  /** "View in IPP": turn the displayed route into an editable canvas. */
  currentAsCanvas(): CanvasGraph {
    return routeToCanvas(this.current().route);
  }
}
