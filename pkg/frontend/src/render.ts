// Canvas rendering: the 2D editing grid and the top-down preview built
// from an exported scene description.

import { ITEM_EMOJI } from './editor.js';
import { itemsAt, type Cell, type SpaceState, type WallEdge } from './model.js';

export const TERRAIN_COLORS: Record<string, string> = {
  g: '#7cb65c',
  r: '#9b9b93',
  w: '#5c9ec9',
};

export const TIME_TINT: Record<string, string> = {
  morning: 'rgba(255,244,214,0.12)',
  dusk: 'rgba(255,150,80,0.18)',
  night: 'rgba(20,30,80,0.38)',
};

export interface GridMetrics {
  cellPx: number;
  edgeHitPx: number;
}

export function defaultMetrics(state: SpaceState, maxPx = 640): GridMetrics {
  const cellPx = Math.floor(maxPx / Math.max(state.grid.width, state.grid.height));
  return { cellPx, edgeHitPx: Math.max(4, Math.floor(cellPx / 6)) };
}

export interface HitResult {
  kind: 'cell' | 'edge' | 'none';
  cell?: Cell;
  edge?: WallEdge;
}

/** Resolve a pointer position to a grid square or a grid-line segment. */
export function hitTest(state: SpaceState, m: GridMetrics, px: number, py: number): HitResult {
  const { width, height } = state.grid;
  if (px < 0 || py < 0 || px >= width * m.cellPx || py >= height * m.cellPx) {
    return { kind: 'none' };
  }
  const cx = Math.floor(px / m.cellPx);
  const cy = Math.floor(py / m.cellPx);
  const dx = px - cx * m.cellPx;
  const dy = py - cy * m.cellPx;
  if (dy < m.edgeHitPx) return { kind: 'edge', edge: ['H', cx, cy] };
  if (dy > m.cellPx - m.edgeHitPx) return { kind: 'edge', edge: ['H', cx, cy + 1] };
  if (dx < m.edgeHitPx) return { kind: 'edge', edge: ['V', cx, cy] };
  if (dx > m.cellPx - m.edgeHitPx) return { kind: 'edge', edge: ['V', cx + 1, cy] };
  return { kind: 'cell', cell: [cx, cy] };
}

export function drawGrid(
  ctx: CanvasRenderingContext2D,
  state: SpaceState,
  m: GridMetrics,
): void {
  const { width, height } = state.grid;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      ctx.fillStyle = TERRAIN_COLORS[state.terrain[y * width + x]];
      ctx.fillRect(x * m.cellPx, y * m.cellPx, m.cellPx, m.cellPx);
      const wear = state.residue[y * width + x];
      if (wear > 0) {
        ctx.fillStyle = `rgba(120,90,50,${0.5 * wear})`;
        ctx.fillRect(x * m.cellPx, y * m.cellPx, m.cellPx, m.cellPx);
      }
    }
  }
  ctx.strokeStyle = 'rgba(0,0,0,0.15)';
  ctx.lineWidth = 1;
  for (let x = 0; x <= width; x++) {
    ctx.beginPath();
    ctx.moveTo(x * m.cellPx, 0);
    ctx.lineTo(x * m.cellPx, height * m.cellPx);
    ctx.stroke();
  }
  for (let y = 0; y <= height; y++) {
    ctx.beginPath();
    ctx.moveTo(0, y * m.cellPx);
    ctx.lineTo(width * m.cellPx, y * m.cellPx);
    ctx.stroke();
  }
  ctx.strokeStyle = '#4a3b2a';
  ctx.lineWidth = Math.max(3, m.cellPx / 8);
  for (const [o, x, y] of state.walls) {
    ctx.beginPath();
    if (o === 'H') {
      ctx.moveTo(x * m.cellPx, y * m.cellPx);
      ctx.lineTo((x + 1) * m.cellPx, y * m.cellPx);
    } else {
      ctx.moveTo(x * m.cellPx, y * m.cellPx);
      ctx.lineTo(x * m.cellPx, (y + 1) * m.cellPx);
    }
    ctx.stroke();
  }
  ctx.font = `${Math.floor(m.cellPx * 0.7)}px serif`;
  ctx.textAlign = 'center';
  ctx.textBaseline = 'middle';
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const here = itemsAt(state, [x, y]);
      if (here.length === 0) continue;
      ctx.fillText(
        ITEM_EMOJI[here[here.length - 1].kind],
        (x + 0.5) * m.cellPx,
        (y + 0.5) * m.cellPx,
      );
      if (here.length > 1) {
        ctx.font = `${Math.floor(m.cellPx * 0.3)}px sans-serif`;
        ctx.fillText(`x${here.length}`, (x + 0.8) * m.cellPx, (y + 0.2) * m.cellPx);
        ctx.font = `${Math.floor(m.cellPx * 0.7)}px serif`;
      }
    }
  }
  ctx.fillStyle = TIME_TINT[state.time_of_day];
  ctx.fillRect(0, 0, width * m.cellPx, height * m.cellPx);
}

interface SceneDoc {
  extent: [number, number];
  tiles: { cell: Cell; terrain: string; wear: number }[];
  walls: { center: [number, number, number]; length: number; yaw_deg: number }[];
  instances: { mesh: string; position: [number, number, number]; scale: number }[];
  lighting: { preset: string; ambient: number };
}

/** Top-down 2.5D look at the exported scene: every PCG instance is drawn,
 * so the "one icon, many things" expansion is visible. */
export function drawPreview(
  ctx: CanvasRenderingContext2D,
  scene: SceneDoc,
  sizePx: number,
): void {
  const [ew, ed] = scene.extent;
  const sx = sizePx / ew;
  const sz = sizePx / ed;
  const cellW = scene.tiles.length > 0 ? ew / Math.sqrt(scene.tiles.length) : 1;
  for (const tile of scene.tiles) {
    ctx.fillStyle = TERRAIN_COLORS[tile.terrain] ?? '#888';
    ctx.fillRect(
      tile.cell[0] * cellW * sx,
      tile.cell[1] * cellW * sz,
      cellW * sx + 1,
      cellW * sz + 1,
    );
    if (tile.wear > 0) {
      ctx.fillStyle = `rgba(120,90,50,${0.5 * tile.wear})`;
      ctx.fillRect(
        tile.cell[0] * cellW * sx,
        tile.cell[1] * cellW * sz,
        cellW * sx + 1,
        cellW * sz + 1,
      );
    }
  }
  ctx.strokeStyle = '#3c2f22';
  for (const wall of scene.walls) {
    const half = wall.length / 2;
    ctx.lineWidth = 4;
    ctx.beginPath();
    if (wall.yaw_deg === 0) {
      ctx.moveTo((wall.center[0] - half) * sx, wall.center[2] * sz);
      ctx.lineTo((wall.center[0] + half) * sx, wall.center[2] * sz);
    } else {
      ctx.moveTo(wall.center[0] * sx, (wall.center[2] - half) * sz);
      ctx.lineTo(wall.center[0] * sx, (wall.center[2] + half) * sz);
    }
    ctx.stroke();
  }
  for (const inst of scene.instances) {
    const [x, , z] = inst.position;
    const r = 2.5 * inst.scale * (inst.mesh.includes('/') ? 2.2 : 1.0);
    ctx.fillStyle = meshColor(inst.mesh);
    ctx.beginPath();
    ctx.arc(x * sx, z * sz, r, 0, Math.PI * 2);
    ctx.fill();
  }
  const darkness = 1 - scene.lighting.ambient / 0.45;
  if (darkness > 0) {
    ctx.fillStyle = `rgba(10,10,40,${0.45 * darkness})`;
    ctx.fillRect(0, 0, sizePx, sizePx);
  }
}

function meshColor(mesh: string): string {
  if (mesh.startsWith('tree/')) return '#1e5e2e';
  if (mesh.startsWith('boulder/')) return '#6f6f68';
  if (mesh.startsWith('flower_patch/')) return '#d070c0';
  if (mesh.startsWith('bench/')) return '#8a5a2b';
  if (mesh.startsWith('statue/')) return '#b8b8c0';
  if (mesh.startsWith('well/')) return '#444a66';
  if (mesh === 'grass_tuft') return '#4f8f3f';
  if (mesh === 'mushroom') return '#c04040';
  if (mesh === 'pebble') return '#7f7f78';
  if (mesh === 'flower') return '#e090d0';
  return '#333';
}
