// Thin gateway client. fetch and WebSocket are injectable so the logic
// tests run in node without a browser or a live server.

import type {
  CommandReply,
  ManualReply,
  SceneConfig,
  StreamMessage,
  TimingRow,
} from "./types.js";

export interface SocketLike {
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
  close(): void;
}

export interface GatewayOptions {
  base?: string;
  fetchImpl?: typeof fetch;
  socketFactory?: (url: string) => SocketLike;
  reconnectDelayMs?: number;
}

export class GatewayClient {
  private readonly base: string;
  private readonly fetchImpl: typeof fetch;
  private readonly socketFactory: (url: string) => SocketLike;
  private readonly reconnectDelayMs: number;

  constructor(options: GatewayOptions = {}) {
    this.base = (options.base ?? "").replace(/\/$/, "");
    this.fetchImpl = options.fetchImpl ?? fetch.bind(globalThis);
    this.socketFactory =
      options.socketFactory ??
      ((url) => new WebSocket(url) as unknown as SocketLike);
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1500;
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(`${this.base}${path}`);
    if (!res.ok) throw new Error(`${path} failed: ${res.status}`);
    return (await res.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchImpl(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw new Error(`${path} failed: ${res.status}`);
    return (await res.json()) as T;
  }

  submitCommand(body: Record<string, unknown>): Promise<CommandReply> {
    return this.postJson("/api/command", body);
  }

  manual(robotId: string, body: Record<string, unknown>): Promise<ManualReply> {
    return this.postJson(`/api/manual/${robotId}`, body);
  }

  state(): Promise<Record<string, unknown>> {
    return this.getJson("/api/state");
  }

  backends(): Promise<{ backends: string[]; default: string }> {
    return this.getJson("/api/backends");
  }

  sceneConfig(): Promise<SceneConfig> {
    return this.getJson("/api/scene");
  }

  timings(): Promise<{ timings: TimingRow[]; tasks: Record<string, unknown>[] }> {
    return this.getJson("/api/timings");
  }

  async timingsCsv(): Promise<string> {
    const res = await this.fetchImpl(`${this.base}/api/timings.csv`);
    if (!res.ok) throw new Error(`timings.csv failed: ${res.status}`);
    return await res.text();
  }

  /** Subscribe to /ws/state. Reconnects after drops until the returned
   * closer is called. onStatus reports connectivity for the header pill. */
  openStateStream(
    everyN: number,
    onMessage: (msg: StreamMessage) => void,
    onStatus?: (connected: boolean) => void,
  ): () => void {
    let closed = false;
    let socket: SocketLike | null = null;
    let timer: ReturnType<typeof setTimeout> | null = null;

    const url = `${this.wsBase()}/ws/state?every_n=${everyN}`;

    const connect = () => {
      if (closed) return;
      socket = this.socketFactory(url);
      socket.onopen = () => onStatus?.(true);
      socket.onmessage = (ev) => {
        try {
          onMessage(JSON.parse(ev.data) as StreamMessage);
        } catch {
          // a malformed frame is dropped, not fatal
        }
      };
      socket.onclose = () => {
        onStatus?.(false);
        if (!closed) {
          timer = setTimeout(connect, this.reconnectDelayMs);
        }
      };
    };
    connect();

    return () => {
      closed = true;
      if (timer !== null) clearTimeout(timer);
      socket?.close();
    };
  }

  private wsBase(): string {
    if (this.base.startsWith("http")) {
      return this.base.replace(/^http/, "ws");
    }
    if (typeof location !== "undefined") {
      const proto = location.protocol === "https:" ? "wss:" : "ws:";
      return `${proto}//${location.host}`;
    }
    return "ws://127.0.0.1:8000";
  }
}
