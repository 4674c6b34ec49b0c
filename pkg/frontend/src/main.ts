// Browser entry point: minimal DOM shell around the controllers.
// Rendering is deliberately plain (nested lists with CSS frames); the
// contract-tested logic lives in ipp.ts / treeBuilder.ts / canvas.ts.

import { GatewayClient } from './api';
import type { CanvasNode } from './canvas';
import { IppController } from './ipp';
import { TreeBuilderPanel, TreeExplorer } from './treeBuilder';

const api = new GatewayClient('');
const panel = new TreeBuilderPanel(api);
const explorer = new TreeExplorer();

let ipp: IppController | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function renderNode(node: CanvasNode): HTMLElement {
  const item = document.createElement('li');
  const label = document.createElement('span');
  if (node.kind === 'chemical') {
    label.className = `chem frame-${node.frame}${node.terminal ? ' terminal' : ''}`;
    label.textContent = node.smiles;
    label.title = 'double-click to expand';
    label.addEventListener('dblclick', () => {
      void expand(node.id);
    });
    label.addEventListener('click', () => {
      ipp?.canvas.select(node.id);
      renderDetail(node.id);
    });
  } else {
    label.className = 'rxn';
    const s = node.suggestion;
    label.textContent = `rank ${s.rank_score.toFixed(3)} / plausibility ${s.plausibility.toFixed(3)}`;
  }
  item.appendChild(label);
  if (node.childIds.length && ipp) {
    const children = document.createElement('ul');
    for (const childId of node.childIds) {
      children.appendChild(renderNode(ipp.canvas.node(childId)));
    }
    item.appendChild(children);
  }
  return item;
}

function renderCanvas(): void {
  if (!ipp) return;
  const host = el<HTMLDivElement>('canvas');
  host.innerHTML = '';
  const list = document.createElement('ul');
  list.appendChild(renderNode(ipp.canvas.node(ipp.canvas.rootId)));
  host.appendChild(list);
}

function renderDetail(nodeId: string): void {
  if (!ipp) return;
  const host = el<HTMLDivElement>('detail');
  const suggestions = ipp.suggestionsFor(nodeId);
  host.innerHTML = `<h3>${ipp.canvas.chemical(nodeId).smiles}</h3>`;
  const list = document.createElement('ol');
  for (const s of suggestions) {
    const row = document.createElement('li');
    row.textContent = `${s.precursors.join(' + ')} (rank ${s.rank_score.toFixed(3)})`;
    list.appendChild(row);
  }
  host.appendChild(list);
}

async function expand(nodeId: string): Promise<void> {
  if (!ipp) return;
  try {
    await ipp.expandNode(nodeId);
    renderCanvas();
    renderDetail(nodeId);
  } catch (error) {
    toast(String(error));
  }
}

function toast(message: string): void {
  const host = el<HTMLDivElement>('toast');
  host.textContent = message;
  host.classList.add('visible');
  setTimeout(() => host.classList.remove('visible'), 4000);
}

function start(): void {
  el<HTMLButtonElement>('one-step').addEventListener('click', () => {
    const target = el<HTMLInputElement>('target').value.trim();
    if (!target) return;
    ipp = new IppController(api, target, {
      topN: Number(el<HTMLInputElement>('top-n').value) || 5,
      strategies: ['template_relevance', 'retrosim'],
    });
    renderCanvas();
    void expand(ipp.canvas.rootId);
  });

  el<HTMLButtonElement>('build-tree').addEventListener('click', async () => {
    const target = el<HTMLInputElement>('target').value.trim();
    if (!target) return;
    try {
      const submitted = await panel.submit(target);
      toast(`job ${submitted.job_id} started`);
      const record = await panel.waitForJob(submitted.job_id);
      if (record.status === 'failed') {
        toast(`job failed: ${record.error}`);
        return;
      }
      explorer.load(record);
      toast(`job completed with ${explorer.count()} routes`);
      renderExplorer();
    } catch (error) {
      toast(String(error));
    }
  });

  el<HTMLButtonElement>('ban-selected').addEventListener('click', async () => {
    if (!ipp || !ipp.canvas.selectedId) return;
    const node = ipp.canvas.node(ipp.canvas.selectedId);
    if (node.kind !== 'chemical') return;
    try {
      await ipp.banChemical(node.smiles);
      renderCanvas();
    } catch (error) {
      toast(String(error));
    }
  });

  el<HTMLButtonElement>('delete-selected').addEventListener('click', () => {
    if (!ipp || !ipp.canvas.selectedId) return;
    try {
      ipp.canvas.deleteSubtree(ipp.canvas.selectedId);
      renderCanvas();
    } catch (error) {
      toast(String(error));
    }
  });

  el<HTMLButtonElement>('add-precursor').addEventListener('click', async () => {
    if (!ipp || !ipp.canvas.selectedId) return;
    const node = ipp.canvas.node(ipp.canvas.selectedId);
    if (node.kind !== 'chemical') return;
    const smiles = el<HTMLInputElement>('manual-smiles').value.trim();
    if (!smiles) return;
    const result = await ipp.addManualPrecursor(node.id, smiles);
    if (!result.ok) {
      toast(`rejected: ${result.error}`);
      return;
    }
    el<HTMLInputElement>('manual-smiles').value = '';
    renderCanvas();
  });

  el<HTMLTextAreaElement>('notes').addEventListener('change', (event) => {
    if (!ipp || !ipp.canvas.selectedId) return;
    ipp.canvas.setNotes(
      ipp.canvas.selectedId,
      (event.target as HTMLTextAreaElement).value,
    );
  });

  el<HTMLInputElement>('import-file').addEventListener('change', async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      const doc = JSON.parse(await file.text());
      const { CanvasGraph } = await import('./canvas');
      ipp = new IppController(api, CanvasGraph.import(doc));
      renderCanvas();
    } catch (error) {
      toast(`import failed: ${error}`);
    } finally {
      input.value = '';
    }
  });

  el<HTMLButtonElement>('export').addEventListener('click', () => {
    if (!ipp) return;
    const blob = new Blob([JSON.stringify(ipp.exportDocument(), null, 2)], {
      type: 'application/json',
    });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'canvas.json';
    link.click();
  });
}

function renderExplorer(): void {
  const host = el<HTMLDivElement>('explorer');
  if (explorer.count() === 0) {
    host.textContent = 'no routes';
    return;
  }
  const { metrics, position } = explorer.current();
  host.innerHTML = `<h3>route ${position + 1} of ${explorer.count()}</h3>`;
  if (metrics) {
    const dl = document.createElement('pre');
    dl.textContent = JSON.stringify(metrics, null, 2);
    host.appendChild(dl);
  }
  const controls = document.createElement('div');
  const prev = document.createElement('button');
  prev.textContent = 'PREV';
  prev.addEventListener('click', () => {
    explorer.previous();
    renderExplorer();
  });
  const next = document.createElement('button');
  next.textContent = 'NEXT';
  next.addEventListener('click', () => {
    explorer.next();
    renderExplorer();
  });
  const view = document.createElement('button');
  view.textContent = 'VIEW IN IPP';
  view.addEventListener('click', () => {
    ipp = new IppController(api, explorer.currentAsCanvas());
    renderCanvas();
  });
  controls.append(prev, next, view);
  host.appendChild(controls);
}

document.addEventListener('DOMContentLoaded', start);
