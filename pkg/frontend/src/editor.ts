// Editor interactions -> absolute edit ops. All ops are computed against
// the current view (never the confirmed-only state) and are always
// absolute: the cycle/toggle logic lives here, not on the wire.

import {
  hasWall,
  inBounds,
  nextTerrain,
  nextTimeOfDay,
  terrainAt,
  edgeValid,
  type Cell,
  type EditOp,
  type ItemKindCode,
  type SpaceState,
  type WallEdge,
} from './model.js';

export const ITEM_EMOJI: Record<ItemKindCode, string> = {
  tree: '\u{1F333}',
  boulder: '\u{1FAA8}',
  bench: '\u{1FA91}',
  flower_patch: '\u{1F33C}',
  statue: '\u{1F5FF}',
  well: '\u{26F2}',
};

export const TIME_EMOJI: Record<string, string> = {
  morning: '\u{1F305}',
  dusk: '\u{1F306}',
  night: '\u{1F319}',
};

export const PALETTE: ItemKindCode[] = [
  'tree',
  'boulder',
  'bench',
  'flower_patch',
  'statue',
  'well',
];

/** Click on a grid square: cycle its terrain (grass -> rock -> water). */
export function onCellClick(view: SpaceState, cell: Cell): EditOp | null {
  if (!inBounds(view, cell)) return null;
  return { op: 'set_terrain', cell, terrain: nextTerrain(terrainAt(view, cell)) };
}

/** Click on a grid line: toggle the wall segment there. */
export function onEdgeClick(view: SpaceState, edge: WallEdge): EditOp | null {
  if (!edgeValid(view, edge)) return null;
  return { op: 'set_wall', edge, present: !hasWall(view, edge) };
}

/** Drop a palette icon onto the grid. */
export function onPaletteDrop(
  view: SpaceState,
  kind: ItemKindCode,
  cell: Cell,
): EditOp | null {
  if (!inBounds(view, cell)) return null;
  return { op: 'place', kind, cell };
}

/** Drag an existing item to another square. */
export function onItemDrag(view: SpaceState, itemId: number, to: Cell): EditOp | null {
  if (!inBounds(view, to)) return null;
  return { op: 'move', item_id: itemId, to_cell: to };
}

/** Drag an item onto the trash. */
export function onTrashDrop(_view: SpaceState, itemId: number): EditOp {
  return { op: 'remove', item_id: itemId };
}

/** Click the sun icon: cycle morning -> dusk -> night. */
export function onSunClick(view: SpaceState): EditOp {
  return { op: 'set_time', time_of_day: nextTimeOfDay(view.time_of_day) };
}
