// Shared test fixtures: fresh spaces and a minimal in-memory authority that
// applies ops in arrival order and emits the same envelopes as the server.

import {
  applyOp,
  cloneSpace,
  type EditOp,
  type SpaceState,
} from '../src/model.js';
import type { OpAppliedMsg, RejectMsg, SubmitMsg } from '../src/protocol.js';

export function freshSpace(width = 16, height = 16): SpaceState {
  return {
    space_id: 'test',
    name: 'test',
    seed: 42,
    grid: { width, height, cell_size: 2.0 },
    time_of_day: 'morning',
    terrain: Array(width * height).fill('g'),
    walls: [],
    items: [],
    residue: Array(width * height).fill(0),
    next_item_id: 1,
    op_seq: 0,
  };
}

export function snapshotJson(s: SpaceState): string {
  return JSON.stringify({ format: 'slowspace', version: 1, ...s });
}

export class FakeAuthority {
  state: SpaceState;

  constructor(initial: SpaceState) {
    this.state = cloneSpace(initial);
  }

  submit(originClient: number, msg: SubmitMsg): OpAppliedMsg | RejectMsg {
    const result = applyOp(this.state, msg.op);
    if (!result.ok) {
      return {
        t: 'reject',
        v: 1,
        client_op_id: msg.client_op_id,
        reason: result.reason ?? 'EditError',
      };
    }
    result.state.op_seq = this.state.op_seq + 1;
    this.state = result.state;
    const out: OpAppliedMsg = {
      t: 'op',
      v: 1,
      seq: this.state.op_seq,
      origin_client: originClient,
      client_op_id: msg.client_op_id,
      op: msg.op,
    };
    if (result.assignedItemId !== undefined) out.assigned_item_id = result.assignedItemId;
    return out;
  }
}

export function op(o: EditOp): EditOp {
  return o;
}
