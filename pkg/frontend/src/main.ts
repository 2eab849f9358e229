// Browser entry point: wires the canvas, palette, and connection together.

import { Connection } from './connection.js';
import {
  ITEM_EMOJI,
  PALETTE,
  TIME_EMOJI,
  onCellClick,
  onEdgeClick,
  onItemDrag,
  onPaletteDrop,
  onSunClick,
  onTrashDrop,
} from './editor.js';
import { itemsAt, type Cell, type ItemKindCode } from './model.js';
import { encode } from './protocol.js';
import { defaultMetrics, drawGrid, drawPreview, hitTest } from './render.js';

function qs<T extends Element>(sel: string): T {
  const el = document.querySelector<T>(sel);
  if (!el) throw new Error(`missing element ${sel}`);
  return el;
}

function httpBase(): string {
  return `${location.protocol}//${location.host}`;
}

function wsUrl(spaceId: string): string {
  const proto = location.protocol === 'https:' ? 'wss' : 'ws';
  return `${proto}://${location.host}/ws/${encodeURIComponent(spaceId)}`;
}

interface DragState {
  kind: 'palette' | 'item';
  itemKind?: ItemKindCode;
  itemId?: number;
}

export function boot(): void {
  const params = new URLSearchParams(location.search);
  const spaceId = params.get('space') ?? 'default';
  const clientName = params.get('name') ?? 'visitor';

  const canvas = qs<HTMLCanvasElement>('#grid');
  const preview = qs<HTMLCanvasElement>('#preview');
  const palette = qs<HTMLDivElement>('#palette');
  const trash = qs<HTMLButtonElement>('#trash');
  const sun = qs<HTMLButtonElement>('#sun');
  const status = qs<HTMLSpanElement>('#status');

  const conn = new Connection(wsUrl(spaceId), spaceId, clientName);
  let drag: DragState | null = null;
  let previewDirty = true;

  for (const kind of PALETTE) {
    const btn = document.createElement('button');
    btn.textContent = ITEM_EMOJI[kind];
    btn.title = kind;
    btn.draggable = true;
    btn.addEventListener('dragstart', () => {
      drag = { kind: 'palette', itemKind: kind };
    });
    palette.appendChild(btn);
  }

  function sendOp(op: ReturnType<typeof onSunClick> | null): void {
    if (!op || !conn.replica) return;
    const msg = conn.replica.onLocal(op);
    if (msg) conn.send(encode(msg));
    previewDirty = true;
    redraw();
  }

  function redraw(): void {
    const replica = conn.replica;
    if (!replica) return;
    const state = replica.view;
    const m = defaultMetrics(state);
    canvas.width = state.grid.width * m.cellPx;
    canvas.height = state.grid.height * m.cellPx;
    const ctx = canvas.getContext('2d');
    if (ctx) drawGrid(ctx, state, m);
    sun.textContent = TIME_EMOJI[state.time_of_day];
    status.textContent = conn.state.connected
      ? `connected · seq ${replica.confirmed.op_seq}`
      : `reconnecting in ${conn.state.reconnectBackoffS}s…`;
  }

  async function refreshPreview(): Promise<void> {
    if (!previewDirty) return;
    previewDirty = false;
    try {
      const res = await fetch(`${httpBase()}/spaces/${encodeURIComponent(spaceId)}/export`);
      if (!res.ok) return;
      const scene = await res.json();
      const ctx = preview.getContext('2d');
      if (ctx) drawPreview(ctx, scene, preview.width);
    } catch {
      previewDirty = true; // retry on the next tick
    }
  }

  function cellFromEvent(ev: MouseEvent): { px: number; py: number } {
    const rect = canvas.getBoundingClientRect();
    return { px: ev.clientX - rect.left, py: ev.clientY - rect.top };
  }

  canvas.addEventListener('click', (ev) => {
    const replica = conn.replica;
    if (!replica) return;
    const { px, py } = cellFromEvent(ev);
    const hit = hitTest(replica.view, defaultMetrics(replica.view), px, py);
    if (hit.kind === 'cell' && hit.cell) sendOp(onCellClick(replica.view, hit.cell));
    else if (hit.kind === 'edge' && hit.edge) sendOp(onEdgeClick(replica.view, hit.edge));
  });

  canvas.addEventListener('mousedown', (ev) => {
    const replica = conn.replica;
    if (!replica) return;
    const { px, py } = cellFromEvent(ev);
    const hit = hitTest(replica.view, defaultMetrics(replica.view), px, py);
    if (hit.kind === 'cell' && hit.cell) {
      const here = itemsAt(replica.view, hit.cell);
      if (here.length > 0) {
        drag = { kind: 'item', itemId: here[here.length - 1].id };
      }
    }
  });

  function dropTarget(ev: DragEvent | MouseEvent): Cell | null {
    const replica = conn.replica;
    if (!replica) return null;
    const { px, py } = cellFromEvent(ev as MouseEvent);
    const hit = hitTest(replica.view, defaultMetrics(replica.view), px, py);
    return hit.kind === 'cell' && hit.cell ? hit.cell : null;
  }

  canvas.addEventListener('dragover', (ev) => ev.preventDefault());
  canvas.addEventListener('drop', (ev) => {
    ev.preventDefault();
    const replica = conn.replica;
    if (!replica || !drag) return;
    const cell = dropTarget(ev);
    if (cell && drag.kind === 'palette' && drag.itemKind) {
      sendOp(onPaletteDrop(replica.view, drag.itemKind, cell));
    }
    drag = null;
  });

  canvas.addEventListener('mouseup', (ev) => {
    const replica = conn.replica;
    if (!replica || !drag || drag.kind !== 'item' || drag.itemId === undefined) return;
    const cell = dropTarget(ev);
    if (cell) sendOp(onItemDrag(replica.view, drag.itemId, cell));
    drag = null;
  });

  trash.addEventListener('dragover', (ev) => ev.preventDefault());
  trash.addEventListener('drop', (ev) => {
    ev.preventDefault();
    const replica = conn.replica;
    if (replica && drag?.kind === 'item' && drag.itemId !== undefined) {
      sendOp(onTrashDrop(replica.view, drag.itemId));
    }
    drag = null;
  });
  trash.addEventListener('click', () => {
    const replica = conn.replica;
    if (replica && drag?.kind === 'item' && drag.itemId !== undefined) {
      sendOp(onTrashDrop(replica.view, drag.itemId));
      drag = null;
    }
  });

  sun.addEventListener('click', () => {
    if (conn.replica) sendOp(onSunClick(conn.replica.view));
  });

  conn.onChange = () => {
    previewDirty = true;
    redraw();
  };
  conn.open();
  setInterval(() => void refreshPreview(), 2000);
}

if (typeof document !== 'undefined' && document.readyState !== 'loading') {
  boot();
} else if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', boot);
}
