// Optimistic client replica: confirmed server state plus a pending queue
// replayed on top. The rendered grid always comes from `view`.

import {
  applyOp,
  cloneSpace,
  type EditOp,
  type SpaceState,
} from './model.js';
import type { OpAppliedMsg, RejectMsg, ResidueMsg, SubmitMsg } from './protocol.js';
import { submit } from './protocol.js';

interface PendingOp {
  clientOpId: number;
  op: EditOp;
  optimisticItemId?: number;
}

function rewriteItemId(op: EditOp, oldId: number, newId: number): EditOp {
  if ((op.op === 'move' || op.op === 'remove') && op.item_id === oldId) {
    return { ...op, item_id: newId };
  }
  return op;
}

export class Replica {
  confirmed: SpaceState;
  view: SpaceState;
  pending: PendingOp[] = [];
  private nextClientOpId = 1;

  constructor(
    readonly clientId: number,
    snapshot: SpaceState,
  ) {
    this.confirmed = snapshot;
    this.view = cloneSpace(snapshot);
  }

  /** Apply locally; returns the submit message to send, or null if invalid. */
  onLocal(op: EditOp): SubmitMsg | null {
    const result = applyOp(this.view, op);
    if (!result.ok) return null;
    const entry: PendingOp = {
      clientOpId: this.nextClientOpId++,
      op,
      optimisticItemId: result.assignedItemId,
    };
    this.pending.push(entry);
    this.view = result.state;
    return submit(entry.clientOpId, op);
  }

  onOpApplied(msg: OpAppliedMsg): void {
    if (msg.seq !== this.confirmed.op_seq + 1) {
      throw new Error(`sequence gap: expected ${this.confirmed.op_seq + 1}, got ${msg.seq}`);
    }
    const result = applyOp(this.confirmed, msg.op);
    if (!result.ok) {
      throw new Error(`server op failed locally at seq ${msg.seq}: ${result.reason}`);
    }
    result.state.op_seq = msg.seq;
    if (msg.origin_client === this.clientId) {
      const head = this.pending[0];
      if (head && head.clientOpId === msg.client_op_id) {
        this.pending.shift();
        if (
          head.optimisticItemId !== undefined &&
          msg.assigned_item_id !== undefined &&
          head.optimisticItemId !== msg.assigned_item_id
        ) {
          this.rewritePending(head.optimisticItemId, msg.assigned_item_id);
        }
      } else if (head && head.clientOpId < msg.client_op_id) {
        throw new Error(`ack ${msg.client_op_id} skipped pending head ${head.clientOpId}`);
      }
      // otherwise the op was dropped at a rebuild; fold its echo like a remote op
    }
    this.confirmed = result.state;
    this.rebuildView();
  }

  onRejected(msg: RejectMsg): void {
    this.pending = this.pending.filter((p) => p.clientOpId !== msg.client_op_id);
    this.rebuildView();
  }

  onResidue(msg: ResidueMsg): void {
    const next = cloneSpace(this.confirmed);
    const idx = msg.cell[1] * next.grid.width + msg.cell[0];
    next.residue[idx] = msg.wear;
    this.confirmed = next;
    this.rebuildView();
  }

  /** Fresh snapshot after reconnect; pending ops are replayed for resending. */
  onReconnectSnapshot(snapshot: SpaceState): SubmitMsg[] {
    this.confirmed = snapshot;
    const toReplay = this.pending;
    this.pending = [];
    this.view = cloneSpace(snapshot);
    const resubmits: SubmitMsg[] = [];
    for (const p of toReplay) {
      const msg = this.onLocal(p.op);
      if (msg) resubmits.push(msg);
    }
    return resubmits;
  }

  private rewritePending(oldId: number, newId: number): void {
    for (const p of this.pending) {
      p.op = rewriteItemId(p.op, oldId, newId);
    }
  }

  private rebuildView(): void {
    let view = this.confirmed;
    const kept: PendingOp[] = [];
    for (const p of this.pending) {
      const result = applyOp(view, p.op);
      if (!result.ok) continue; // invalidated by a confirmed op
      if (
        result.assignedItemId !== undefined &&
        p.optimisticItemId !== result.assignedItemId
      ) {
        const old = p.optimisticItemId;
        p.optimisticItemId = result.assignedItemId;
        if (old !== undefined) {
          for (const q of this.pending) {
            if (q !== p) q.op = rewriteItemId(q.op, old, result.assignedItemId);
          }
        }
      }
      view = result.state;
      kept.push(p);
    }
    this.pending = kept;
    this.view = view === this.confirmed ? cloneSpace(this.confirmed) : view;
  }
}
