// Session client: revision-gated snapshot state over a message transport.
//
// The transport is anything with send(); the browser shell wires a
// WebSocket, tests wire fakes or the node "ws" client. Events queue while
// disconnected and flush in order on (re)connect, so user-action order is
// preserved.

import { MetricsRecord, parseServerMessage, Snapshot, TraceRecord } from "./protocol.js";

export interface Transport {
  send(text: string): void;
}

export interface ClientHooks {
  onSnapshot?: (snap: Snapshot) => void;
  onMetrics?: (m: MetricsRecord) => void;
  onError?: (reason: string) => void;
  onQueueChange?: (pending: number) => void;
}

export class ClientSession {
  latest: Snapshot | null = null;
  metrics: MetricsRecord[] = [];
  private transport: Transport | null = null;
  private queue: string[] = [];
  private traceWaiters: ((text: string) => void)[] = [];

  constructor(private hooks: ClientHooks = {}) {}

  attach(transport: Transport): void {
    this.transport = transport;
    this.flush();
  }

  detach(): void {
    this.transport = null;
  }

  get connected(): boolean {
    return this.transport !== null;
  }

  get pendingCount(): number {
    return this.queue.length;
  }

  handleMessage(text: string): void {
    const msg = parseServerMessage(text);
    if (msg.type === "snapshot") {
      // render only the highest revision ever received
      if (this.latest !== null && msg.revision <= this.latest.revision) return;
      this.latest = msg;
      this.hooks.onSnapshot?.(msg);
    } else if (msg.type === "metrics") {
      this.metrics.push(msg);
      this.hooks.onMetrics?.(msg);
    } else if (msg.type === "error") {
      this.hooks.onError?.(msg.reason);
    } else {
      const waiter = this.traceWaiters.shift();
      waiter?.((msg as TraceRecord).text);
    }
  }

  send(records: string[]): void {
    if (records.length === 0) return;
    const frame = records.join("\n");
    if (this.transport === null) {
      this.queue.push(frame);
      this.hooks.onQueueChange?.(this.queue.length);
      return;
    }
    this.transport.send(frame);
  }

  requestTrace(): Promise<string> {
    return new Promise((resolve) => {
      this.traceWaiters.push(resolve);
      this.send([`{"type":"download_trace"}`]);
    });
  }

  private flush(): void {
    if (this.transport === null) return;
    for (const frame of this.queue) this.transport.send(frame);
    this.queue = [];
    this.hooks.onQueueChange?.(0);
  }
}
