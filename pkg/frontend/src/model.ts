// Client-side mirror of the scene state and edit semantics, operating on
// the wire representation (the space file format). Must apply ops exactly
// like the server so optimistic views and confirmed folds agree.

export type TerrainCode = 'g' | 'r' | 'w';
export type TimeOfDayCode = 'morning' | 'dusk' | 'night';
export type ItemKindCode =
  | 'tree'
  | 'boulder'
  | 'bench'
  | 'flower_patch'
  | 'statue'
  | 'well';

export const TERRAIN_CYCLE: TerrainCode[] = ['g', 'r', 'w'];
export const TIME_CYCLE: TimeOfDayCode[] = ['morning', 'dusk', 'night'];
export const MAX_ITEMS_PER_CELL = 8;

export type Cell = [number, number];
export type WallEdge = ['H' | 'V', number, number];

export interface Item {
  id: number;
  kind: ItemKindCode;
  cell: Cell;
}

export interface SpaceState {
  space_id: string;
  name: string;
  seed: number;
  grid: { width: number; height: number; cell_size: number };
  time_of_day: TimeOfDayCode;
  terrain: TerrainCode[];
  walls: WallEdge[];
  items: Item[];
  residue: number[];
  next_item_id: number;
  op_seq: number;
}

export type EditOp =
  | { op: 'set_terrain'; cell: Cell; terrain: TerrainCode }
  | { op: 'set_wall'; edge: WallEdge; present: boolean }
  | { op: 'place'; kind: ItemKindCode; cell: Cell }
  | { op: 'move'; item_id: number; to_cell: Cell }
  | { op: 'remove'; item_id: number }
  | { op: 'set_time'; time_of_day: TimeOfDayCode };

export function parseSpace(snapshot: string): SpaceState {
  const doc = JSON.parse(snapshot);
  if (doc.format !== 'slowspace' || doc.version !== 1) {
    throw new Error('not a slowspace v1 snapshot');
  }
  return {
    space_id: doc.space_id,
    name: doc.name,
    seed: doc.seed,
    grid: doc.grid,
    time_of_day: doc.time_of_day,
    terrain: doc.terrain,
    walls: doc.walls,
    items: doc.items,
    residue: doc.residue,
    next_item_id: doc.next_item_id,
    op_seq: doc.op_seq,
  };
}

export function cloneSpace(s: SpaceState): SpaceState {
  return {
    ...s,
    grid: { ...s.grid },
    terrain: [...s.terrain],
    walls: s.walls.map((w) => [...w] as WallEdge),
    items: s.items.map((it) => ({ ...it, cell: [...it.cell] as Cell })),
    residue: [...s.residue],
  };
}

export function inBounds(s: SpaceState, [x, y]: Cell): boolean {
  return x >= 0 && x < s.grid.width && y >= 0 && y < s.grid.height;
}

export function cellIndex(s: SpaceState, [x, y]: Cell): number {
  return y * s.grid.width + x;
}

export function terrainAt(s: SpaceState, cell: Cell): TerrainCode {
  return s.terrain[cellIndex(s, cell)];
}

export function nextTerrain(t: TerrainCode): TerrainCode {
  return TERRAIN_CYCLE[(TERRAIN_CYCLE.indexOf(t) + 1) % 3];
}

export function nextTimeOfDay(t: TimeOfDayCode): TimeOfDayCode {
  return TIME_CYCLE[(TIME_CYCLE.indexOf(t) + 1) % 3];
}

export function edgeValid(s: SpaceState, [o, x, y]: WallEdge): boolean {
  if (o === 'H') return x >= 0 && x < s.grid.width && y >= 0 && y <= s.grid.height;
  return x >= 0 && x <= s.grid.width && y >= 0 && y < s.grid.height;
}

export function edgeKey([o, x, y]: WallEdge): string {
  return `${o}:${x}:${y}`;
}

export function hasWall(s: SpaceState, edge: WallEdge): boolean {
  const key = edgeKey(edge);
  return s.walls.some((w) => edgeKey(w) === key);
}

export function itemsAt(s: SpaceState, cell: Cell): Item[] {
  return s.items.filter((it) => it.cell[0] === cell[0] && it.cell[1] === cell[1]);
}

export function findItem(s: SpaceState, id: number): Item | undefined {
  return s.items.find((it) => it.id === id);
}

export interface ApplyResult {
  ok: boolean;
  reason?: string;
  state: SpaceState;
  assignedItemId?: number;
}

/** Apply one edit op; on failure returns the input state untouched. */
export function applyOp(s: SpaceState, op: EditOp): ApplyResult {
  switch (op.op) {
    case 'set_terrain': {
      if (!inBounds(s, op.cell)) return { ok: false, reason: 'OutOfBounds', state: s };
      const next = cloneSpace(s);
      next.terrain[cellIndex(s, op.cell)] = op.terrain;
      return { ok: true, state: next };
    }
    case 'set_wall': {
      if (!edgeValid(s, op.edge)) return { ok: false, reason: 'OutOfBounds', state: s };
      const next = cloneSpace(s);
      const key = edgeKey(op.edge);
      next.walls = next.walls.filter((w) => edgeKey(w) !== key);
      if (op.present) next.walls.push([...op.edge] as WallEdge);
      return { ok: true, state: next };
    }
    case 'place': {
      if (!inBounds(s, op.cell)) return { ok: false, reason: 'OutOfBounds', state: s };
      if (itemsAt(s, op.cell).length >= MAX_ITEMS_PER_CELL) {
        return { ok: false, reason: 'CellFull', state: s };
      }
      const next = cloneSpace(s);
      const id = next.next_item_id;
      next.items.push({ id, kind: op.kind, cell: [...op.cell] as Cell });
      next.next_item_id = id + 1;
      return { ok: true, state: next, assignedItemId: id };
    }
    case 'move': {
      const item = findItem(s, op.item_id);
      if (!item) return { ok: false, reason: 'NoSuchItem', state: s };
      if (!inBounds(s, op.to_cell)) return { ok: false, reason: 'OutOfBounds', state: s };
      const occupants = itemsAt(s, op.to_cell).filter((it) => it.id !== op.item_id);
      if (occupants.length >= MAX_ITEMS_PER_CELL) {
        return { ok: false, reason: 'CellFull', state: s };
      }
      const next = cloneSpace(s);
      next.items = next.items.map((it) =>
        it.id === op.item_id ? { ...it, cell: [...op.to_cell] as Cell } : it,
      );
      return { ok: true, state: next };
    }
    case 'remove': {
      if (!findItem(s, op.item_id)) return { ok: false, reason: 'NoSuchItem', state: s };
      const next = cloneSpace(s);
      next.items = next.items.filter((it) => it.id !== op.item_id);
      return { ok: true, state: next };
    }
    case 'set_time': {
      const next = cloneSpace(s);
      next.time_of_day = op.time_of_day;
      return { ok: true, state: next };
    }
  }
}
