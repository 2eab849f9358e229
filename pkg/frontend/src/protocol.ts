// Wire envelopes: one JSON object per WebSocket text frame,
// {"t": tag, "v": 1, ...payload}.

import type { Cell, EditOp } from './model.js';

export const PROTO_VERSION = 1;

export interface HelloMsg {
  t: 'hello';
  v: 1;
  proto_version: number;
  space_id: string;
  client_name: string;
}

export interface SubmitMsg {
  t: 'submit';
  v: 1;
  client_op_id: number;
  op: EditOp;
}

export interface PresenceMsg {
  t: 'presence';
  v: 1;
  position: [number, number, number];
  dwell_s: number;
}

export interface WelcomeMsg {
  t: 'welcome';
  v: 1;
  client_id: number;
  snapshot: string;
  seq: number;
}

export interface OpAppliedMsg {
  t: 'op';
  v: 1;
  seq: number;
  origin_client: number;
  client_op_id: number;
  op: EditOp;
  assigned_item_id?: number;
}

export interface RejectMsg {
  t: 'reject';
  v: 1;
  client_op_id: number;
  reason: string;
}

export interface PresenceBroadcastMsg {
  t: 'presence_b';
  v: 1;
  client_id: number;
  cell: Cell;
}

export interface ResidueMsg {
  t: 'residue';
  v: 1;
  cell: Cell;
  wear: number;
}

export interface ErrorMsg {
  t: 'error';
  v: 1;
  code: string;
  detail: string;
}

export type ClientEnvelope = HelloMsg | SubmitMsg | PresenceMsg;
export type ServerEnvelope =
  | WelcomeMsg
  | OpAppliedMsg
  | RejectMsg
  | PresenceBroadcastMsg
  | ResidueMsg
  | ErrorMsg;
export type Envelope = ClientEnvelope | ServerEnvelope;

const TAGS = new Set([
  'hello',
  'submit',
  'presence',
  'welcome',
  'op',
  'reject',
  'presence_b',
  'residue',
  'error',
]);

export function encode(env: Envelope): string {
  return JSON.stringify(env);
}

export function decode(frame: string): ServerEnvelope {
  let doc: unknown;
  try {
    doc = JSON.parse(frame);
  } catch {
    throw new Error('malformed frame: not JSON');
  }
  if (typeof doc !== 'object' || doc === null) {
    throw new Error('malformed frame: not an object');
  }
  const env = doc as { t?: string; v?: number };
  if (env.v !== PROTO_VERSION) throw new Error(`unsupported protocol version ${env.v}`);
  if (!env.t || !TAGS.has(env.t)) throw new Error(`unknown tag ${env.t}`);
  return doc as ServerEnvelope;
}

export function hello(spaceId: string, clientName: string): HelloMsg {
  return {
    t: 'hello',
    v: 1,
    proto_version: PROTO_VERSION,
    space_id: spaceId,
    client_name: clientName,
  };
}

export function submit(clientOpId: number, op: EditOp): SubmitMsg {
  return { t: 'submit', v: 1, client_op_id: clientOpId, op };
}
