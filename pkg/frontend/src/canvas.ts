// In-memory canvas model for the interactive planner.
//
// Chemical nodes render as rectangles, reaction nodes as circles; the
// frame color encodes buyable / known / unknown exactly as reported by
// the gateway.  The model holds no chemistry of its own, so export and
// import are plain structural serialization.

import type { GraphNodeDoc, SuggestionDoc } from './types';

export type FrameColor = 'buyable' | 'known' | 'unknown';

export interface ChemicalNode {
  id: string;
  kind: 'chemical';
  smiles: string;
  frame: FrameColor;
  terminal: boolean;
  userAdded: boolean;
  notes: string;
  parentId: string | null;
  childIds: string[];
}

export interface ReactionNode {
  id: string;
  kind: 'reaction';
  suggestion: SuggestionDoc;
  userAdded: boolean;
  notes: string;
  parentId: string;
  childIds: string[];
}

export type CanvasNode = ChemicalNode | ReactionNode;

export interface CanvasDocument {
  version: 1;
  rootId: string;
  selectedId: string | null;
  nodes: CanvasNode[];
}

export function frameFor(buyable: boolean, known: boolean): FrameColor {
  if (buyable) return 'buyable';
  if (known) return 'known';
  return 'unknown';
}

export class CanvasGraph {
  private nodes = new Map<string, CanvasNode>();
  private counter = 0;
  rootId = '';
  selectedId: string | null = null;

  static withTarget(smiles: string): CanvasGraph {
    const canvas = new CanvasGraph();
    const root: ChemicalNode = {
      id: canvas.nextId('chem'),
      kind: 'chemical',
      smiles,
      frame: 'unknown',
      terminal: false,
      userAdded: false,
      notes: '',
      parentId: null,
      childIds: [],
    };
    canvas.nodes.set(root.id, root);
    canvas.rootId = root.id;
    return canvas;
  }

  private nextId(prefix: string): string {
    this.counter += 1;
    return `${prefix}-${this.counter}`;
  }

  node(id: string): CanvasNode {
    const node = this.nodes.get(id);
    if (!node) throw new Error(`no canvas node ${id}`);
    return node;
  }

  chemical(id: string): ChemicalNode {
    const node = this.node(id);
    if (node.kind !== 'chemical') throw new Error(`${id} is not a chemical node`);
    return node;
  }

  allNodes(): CanvasNode[] {
    return [...this.nodes.values()];
  }

  select(id: string | null): void {
    if (id !== null) this.node(id);
    this.selectedId = id;
  }

  setNotes(id: string, notes: string): void {
    this.node(id).notes = notes;
  }

  /** Add one suggestion under a chemical node: a reaction circle plus
   * one rectangle per precursor, framed from the gateway's flags. */
  addSuggestion(parentId: string, suggestion: SuggestionDoc, userAdded = false): ReactionNode {
    const parent = this.chemical(parentId);
    const reaction: ReactionNode = {
      id: this.nextId('rxn'),
      kind: 'reaction',
      suggestion,
      userAdded,
      notes: '',
      parentId: parent.id,
      childIds: [],
    };
    this.nodes.set(reaction.id, reaction);
    parent.childIds.push(reaction.id);
    suggestion.precursors.forEach((smiles, i) => {
      const child: ChemicalNode = {
        id: this.nextId('chem'),
        kind: 'chemical',
        smiles,
        frame: frameFor(
          suggestion.precursor_buyable[i] ?? false,
          suggestion.precursor_known[i] ?? false,
        ),
        terminal: false,
        userAdded,
        notes: '',
        parentId: reaction.id,
        childIds: [],
      };
      this.nodes.set(child.id, child);
      reaction.childIds.push(child.id);
    });
    return reaction;
  }

  markTerminal(id: string): void {
    this.chemical(id).terminal = true;
  }

  deleteSubtree(id: string): void {
    const node = this.node(id);
    if (node.id === this.rootId) throw new Error('cannot delete the target node');
    for (const childId of [...node.childIds]) {
      this.deleteSubtree(childId);
    }
    if (node.parentId !== null) {
      const parent = this.node(node.parentId);
      parent.childIds = parent.childIds.filter((c) => c !== node.id);
    }
    if (this.selectedId === node.id) this.selectedId = null;
    this.nodes.delete(node.id);
  }

  /** Remove every reaction whose precursors include the banned
   * molecule (the gateway will not propose it again either). */
  pruneChemical(smiles: string): number {
    let removed = 0;
    for (const node of [...this.nodes.values()]) {
      if (node.kind !== 'reaction') continue;
      if (!this.nodes.has(node.id)) continue; // already gone with an ancestor
      if (node.suggestion.precursors.includes(smiles)) {
        this.deleteSubtree(node.id);
        removed += 1;
      }
    }
    return removed;
  }

  childReactions(chemicalId: string): ReactionNode[] {
    return this.chemical(chemicalId).childIds.map((id) => this.node(id) as ReactionNode);
  }

  childChemicals(reactionId: string): ChemicalNode[] {
    const node = this.node(reactionId);
    return node.childIds.map((id) => this.node(id) as ChemicalNode);
  }

  containsChemical(smiles: string): boolean {
    return this.allNodes().some(
      (node) => node.kind === 'chemical' && node.smiles === smiles,
    );
  }

  export(): CanvasDocument {
    const ordered = [...this.nodes.values()].sort((a, b) =>
      a.id.localeCompare(b.id, 'en'),
    );
    return {
      version: 1,
      rootId: this.rootId,
      selectedId: this.selectedId,
      nodes: ordered.map((node) => structuredClone(node)),
    };
  }

  static import(doc: CanvasDocument): CanvasGraph {
    if (doc.version !== 1) throw new Error(`unsupported canvas version ${doc.version}`);
    const canvas = new CanvasGraph();
    canvas.rootId = doc.rootId;
    canvas.selectedId = doc.selectedId;
    let maxCounter = 0;
    for (const node of doc.nodes) {
      canvas.nodes.set(node.id, structuredClone(node));
      const n = Number(node.id.split('-').pop());
      if (Number.isFinite(n)) maxCounter = Math.max(maxCounter, n);
    }
    canvas.counter = maxCounter;
    return canvas;
  }
}

/** Rebuild a route document from the gateway as a fresh canvas, so a
 * tree-builder result can be continued interactively ("view in IPP").
 * Every attribute (scores, buyability) comes from the document. */
export function routeToCanvas(route: GraphNodeDoc): CanvasGraph {
  if (route.type !== 'chemical' || !route.smiles) {
    throw new Error('route documents must be rooted at a chemical node');
  }
  const canvas = CanvasGraph.withTarget(route.smiles);
  const attach = (doc: GraphNodeDoc, chemicalId: string) => {
    for (const reactionDoc of doc.children) {
      if (reactionDoc.type !== 'reaction') continue;
      const attrs = reactionDoc.attributes as Record<string, unknown>;
      const precursorDocs = reactionDoc.children.filter(
        (c) => c.type === 'chemical' && c.smiles,
      );
      const suggestion: SuggestionDoc = {
        precursors: precursorDocs.map((c) => c.smiles as string),
        precursor_buyable: precursorDocs.map(
          (c) => Boolean((c.attributes as Record<string, unknown>).buyable),
        ),
        precursor_known: precursorDocs.map(() => false),
        rank_score: Number(attrs.score ?? 0),
        plausibility: Number(attrs.plausibility ?? 0),
        strategy_provenance: (attrs.provenance as string[]) ?? [],
        template_ids: (attrs.template_ids as string[]) ?? [],
        precedent_reaction_ids: (attrs.precedent_ids as string[]) ?? [],
        reacting_atoms: null,
        cluster_id: null,
      };
      const reaction = canvas.addSuggestion(chemicalId, suggestion);
      reaction.childIds.forEach((childId, i) => {
        attach(precursorDocs[i], childId);
      });
    }
  };
  attach(route, canvas.rootId);
  return canvas;
}
