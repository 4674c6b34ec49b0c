import { describe, expect, it } from 'vitest';

import { CanvasGraph, frameFor } from '../src/canvas';
import type { ExpandResponse } from '../src/types';
import { fixture } from './helpers';

const expandFixture = fixture<ExpandResponse>('expand_target.json');

describe('frame colors', () => {
  it('maps buyable/known/unknown', () => {
    expect(frameFor(true, true)).toBe('buyable');
    expect(frameFor(false, true)).toBe('known');
    expect(frameFor(false, false)).toBe('unknown');
  });
});

describe('CanvasGraph', () => {
  it('creates a target root', () => {
    const canvas = CanvasGraph.withTarget(expandFixture.target);
    const root = canvas.chemical(canvas.rootId);
    expect(root.smiles).toBe(expandFixture.target);
    expect(root.parentId).toBeNull();
  });

  it('adds suggestion subtrees with gateway-provided frames', () => {
    const canvas = CanvasGraph.withTarget(expandFixture.target);
    const suggestion = expandFixture.suggestions[0];
    const reaction = canvas.addSuggestion(canvas.rootId, suggestion);
    expect(reaction.kind).toBe('reaction');
    const children = canvas.childChemicals(reaction.id);
    expect(children.map((c) => c.smiles)).toEqual(suggestion.precursors);
    children.forEach((child, i) => {
      expect(child.frame).toBe(
        frameFor(suggestion.precursor_buyable[i], suggestion.precursor_known[i]),
      );
    });
  });

  it('export/import round-trips losslessly', () => {
    const canvas = CanvasGraph.withTarget(expandFixture.target);
    for (const suggestion of expandFixture.suggestions) {
      canvas.addSuggestion(canvas.rootId, suggestion);
    }
    canvas.setNotes(canvas.rootId, 'check selectivity with the team');
    canvas.select(canvas.rootId);
    const doc = canvas.export();
    const restored = CanvasGraph.import(doc);
    expect(restored.export()).toEqual(doc);
    expect(restored.chemical(restored.rootId).notes).toBe(
      'check selectivity with the team',
    );
    // Imported canvases keep growing without id collisions.
    const added = restored.addSuggestion(
      restored.rootId,
      expandFixture.suggestions[0],
    );
    const ids = restored.allNodes().map((n) => n.id);
    expect(new Set(ids).size).toBe(ids.length);
    expect(added.childIds.length).toBeGreaterThan(0);
  });

  it('deletes subtrees but never the root', () => {
    const canvas = CanvasGraph.withTarget(expandFixture.target);
    const reaction = canvas.addSuggestion(canvas.rootId, expandFixture.suggestions[0]);
    const before = canvas.allNodes().length;
    canvas.deleteSubtree(reaction.id);
    expect(canvas.allNodes().length).toBe(
      before - 1 - expandFixture.suggestions[0].precursors.length,
    );
    expect(() => canvas.deleteSubtree(canvas.rootId)).toThrow();
  });

  it('prunes every reaction containing a banned molecule', () => {
    const canvas = CanvasGraph.withTarget(expandFixture.target);
    for (const suggestion of expandFixture.suggestions) {
      canvas.addSuggestion(canvas.rootId, suggestion);
    }
    const banned = expandFixture.suggestions[0].precursors[0];
    expect(canvas.containsChemical(banned)).toBe(true);
    const removed = canvas.pruneChemical(banned);
    expect(removed).toBeGreaterThan(0);
    expect(canvas.containsChemical(banned)).toBe(false);
  });
});
