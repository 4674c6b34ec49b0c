// Interactive path planner controller: ties the gateway client to the
// canvas model.  All chemistry-bearing data (suggestion order, scores,
// buyability frames) passes through untouched from gateway responses.

import { ApiError, GatewayClient } from './api';
import { CanvasGraph } from './canvas';
import type { ExpandResponse, SuggestionDoc } from './types';

export interface IppSettings {
  topN: number;
  strategies: string[];
}

export interface ManualResult {
  ok: boolean;
  error?: string;
}

export type SuggestionSortKey = 'rank_score' | 'plausibility' | 'cluster_id';

export class IppController {
  readonly canvas: CanvasGraph;
  private readonly detail = new Map<string, SuggestionDoc[]>();
  private readonly inFlight = new Set<string>();

  constructor(
    private readonly api: GatewayClient,
    target: string | CanvasGraph,
    private readonly settings: IppSettings = {
      topN: 5,
      strategies: ['template_relevance'],
    },
  ) {
    // A canvas (e.g. an imported document or a tree-builder route)
    // can seed the session in place of a bare target.
    this.canvas =
      typeof target === 'string' ? CanvasGraph.withTarget(target) : target;
  }

  /** Expand a chemical node: query the gateway, remember the full
   * suggestion list for the detail panel, and add the top N as child
   * subtrees in exactly the gateway's order. */
  async expandNode(nodeId: string): Promise<ExpandResponse> {
    if (this.inFlight.has(nodeId)) {
      throw new Error(`expansion already running for ${nodeId}`);
    }
    const chemical = this.canvas.chemical(nodeId);
    this.inFlight.add(nodeId);
    try {
      const response = await this.api.expand(
        chemical.smiles,
        this.settings.strategies,
      );
      // Re-expansion refreshes the node: drop stale child subtrees so
      // the canvas mirrors the latest gateway answer.
      for (const rxn of this.canvas.childReactions(nodeId)) {
        this.canvas.deleteSubtree(rxn.id);
      }
      this.detail.set(nodeId, response.suggestions);
      if (response.suggestions.length === 0) {
        this.canvas.markTerminal(nodeId);
        return response;
      }
      for (const suggestion of response.suggestions.slice(0, this.settings.topN)) {
        this.canvas.addSuggestion(nodeId, suggestion);
      }
      return response;
    } finally {
      this.inFlight.delete(nodeId);
    }
  }

  /** Full suggestion list for the node detail window, in gateway order. */
  suggestionsFor(nodeId: string): SuggestionDoc[] {
    return this.detail.get(nodeId) ?? [];
  }

  /** Detail-panel resorting over gateway-provided fields only. */
  sortedSuggestions(nodeId: string, key: SuggestionSortKey): SuggestionDoc[] {
    const items = [...this.suggestionsFor(nodeId)];
    if (key === 'cluster_id') {
      items.sort((a, b) => (a.cluster_id ?? 0) - (b.cluster_id ?? 0));
    } else {
      items.sort((a, b) => (b[key] as number) - (a[key] as number));
    }
    return items;
  }

  /** Suggestions whose reaction center touches the given target atom. */
  filterByReactingAtom(nodeId: string, atomIndex: number): SuggestionDoc[] {
    return this.suggestionsFor(nodeId).filter((s) =>
      (s.reacting_atoms ?? []).includes(atomIndex),
    );
  }

  /** Labels of suggestion children on the canvas, in display order. */
  displayedPrecursorSets(nodeId: string): string[][] {
    return this.canvas
      .childReactions(nodeId)
      .map((rxn) => this.canvas.childChemicals(rxn.id).map((c) => c.smiles));
  }

  /** Ban a molecule: register with the gateway, then prune the canvas. */
  async banChemical(smiles: string): Promise<string> {
    const canonical = (await this.api.canonicalize(smiles)).smiles;
    await this.api.banChemical(canonical);
    this.canvas.pruneChemical(canonical);
    return canonical;
  }

  /** Add a user-defined precursor set; unparsable SMILES is rejected
   * inline (the gateway validates, never the client). */
  async addManualPrecursor(nodeId: string, smiles: string): Promise<ManualResult> {
    let canonical: string;
    try {
      canonical = (await this.api.canonicalize(smiles)).smiles;
    } catch (error) {
      if (error instanceof ApiError) {
        const detail = (error.body as { detail?: { error?: string } })?.detail;
        return { ok: false, error: detail?.error ?? 'unparsable SMILES' };
      }
      throw error;
    }
    const manual: SuggestionDoc = {
      precursors: [canonical],
      precursor_buyable: [false],
      precursor_known: [false],
      rank_score: 1.0,
      plausibility: 1.0,
      strategy_provenance: ['user'],
      template_ids: [],
      precedent_reaction_ids: [],
      reacting_atoms: null,
      cluster_id: null,
    };
    this.canvas.addSuggestion(nodeId, manual, true);
    return { ok: true };
  }

  exportDocument() {
    return this.canvas.export();
  }
}
