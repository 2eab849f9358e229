// WebSocket connection with exponential-backoff reconnect. On rejoin the
// server sends a fresh Welcome snapshot and pending ops are resubmitted.

import { parseSpace } from './model.js';
import { decode, encode, hello, type ServerEnvelope } from './protocol.js';
import { Replica } from './replica.js';

export const BACKOFF_BASE_S = 1;
export const BACKOFF_FACTOR = 2;
export const BACKOFF_CAP_S = 30;

const WS_OPEN = 1; // WebSocket.OPEN, without requiring the global in tests

export function backoffDelayS(attempt: number): number {
  return Math.min(BACKOFF_CAP_S, BACKOFF_BASE_S * Math.pow(BACKOFF_FACTOR, attempt));
}

export interface ConnectionState {
  connected: boolean;
  reconnectBackoffS: number;
}

type SocketFactory = (url: string) => WebSocket;

export class Connection {
  replica: Replica | null = null;
  state: ConnectionState = { connected: false, reconnectBackoffS: BACKOFF_BASE_S };
  onChange: () => void = () => {};

  private ws: WebSocket | null = null;
  private attempt = 0;
  private closed = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly spaceId: string,
    private readonly clientName: string,
    private readonly makeSocket: SocketFactory = (u) => new WebSocket(u),
  ) {}

  open(): void {
    this.closed = false;
    this.connect();
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.ws?.close();
  }

  send(frame: string): void {
    if (this.ws && this.ws.readyState === WS_OPEN) {
      this.ws.send(frame);
    }
  }

  private connect(): void {
    const ws = this.makeSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      ws.send(encode(hello(this.spaceId, this.clientName)));
    };
    ws.onmessage = (ev) => this.handleFrame(String(ev.data));
    ws.onclose = () => {
      this.state.connected = false;
      this.onChange();
      if (!this.closed) this.scheduleReconnect();
    };
    ws.onerror = () => {
      ws.close();
    };
  }

  private scheduleReconnect(): void {
    const delay = backoffDelayS(this.attempt);
    this.state.reconnectBackoffS = delay;
    this.attempt += 1;
    this.onChange();
    this.reconnectTimer = setTimeout(() => this.connect(), delay * 1000);
  }

  private handleFrame(frame: string): void {
    let env: ServerEnvelope;
    try {
      env = decode(frame);
    } catch (e) {
      console.warn('dropping bad frame:', e);
      return;
    }
    switch (env.t) {
      case 'welcome': {
        const snapshot = parseSpace(env.snapshot);
        this.attempt = 0;
        this.state.connected = true;
        this.state.reconnectBackoffS = BACKOFF_BASE_S;
        if (this.replica === null) {
          this.replica = new Replica(env.client_id, snapshot);
        } else {
          // rejoin: fold pending over the fresh snapshot and resend
          const replica = new Replica(env.client_id, snapshot);
          const old = this.replica;
          this.replica = replica;
          for (const p of old.pending) {
            const msg = replica.onLocal(p.op);
            if (msg) this.send(encode(msg));
          }
        }
        break;
      }
      case 'op':
        this.replica?.onOpApplied(env);
        break;
      case 'reject':
        this.replica?.onRejected(env);
        break;
      case 'residue':
        this.replica?.onResidue(env);
        break;
      case 'presence_b':
        break;
      case 'error':
        console.warn('server error:', env.code, env.detail);
        break;
    }
    this.onChange();
  }
}
