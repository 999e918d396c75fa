// Session driver: owns the tick clock, forwards arrow keys, and re-renders
// from server responses. The server is authoritative for all game state.

import { SceneNode, Transport, WorldView } from "./protocol.js";

export type Status = "idle" | "playing" | "over" | "disconnected";

export interface TickTimer {
  start(intervalMs: number, callback: () => void): void;
  stop(): void;
}

export class IntervalTimer implements TickTimer {
  private handle: ReturnType<typeof setInterval> | null = null;

  start(intervalMs: number, callback: () => void): void {
    this.stop();
    this.handle = setInterval(callback, intervalMs);
  }

  stop(): void {
    if (this.handle !== null) {
      clearInterval(this.handle);
      this.handle = null;
    }
  }
}

const KEY_OF_ARROW: Record<string, string> = {
  ArrowUp: "up",
  ArrowDown: "down",
  ArrowLeft: "left",
  ArrowRight: "right",
};

export interface ClientOptions {
  ticksPerSecond?: number;
  onStatus?: (status: Status) => void;
}

export class GameClient {
  status: Status = "idle";
  sessionId: string | null = null;
  lastWorld: WorldView | null = null;
  lastScene: SceneNode | null = null;

  private readonly ticksPerSecond: number;
  private readonly onStatus: (status: Status) => void;
  private tickInFlight = false;
  private lastStart: { seed: number; config?: Record<string, unknown> } | null = null;

  constructor(
    private readonly transport: Transport,
    private readonly render: (scene: SceneNode) => void,
    private readonly timer: TickTimer,
    options: ClientOptions = {},
  ) {
    this.ticksPerSecond = options.ticksPerSecond ?? 28;
    this.onStatus = options.onStatus ?? (() => undefined);
  }

  async start(seed = 0, config?: Record<string, unknown>): Promise<void> {
    this.timer.stop();
    this.lastStart = { seed, config };
    try {
      const created = await this.transport.createGame(seed, config);
      this.sessionId = created.id;
      this.lastWorld = created.world;
      this.setStatus("playing");
      await this.refreshScene();
      this.timer.start(1000 / this.ticksPerSecond, () => {
        void this.onTickTimer();
      });
    } catch {
      this.disconnect();
    }
  }

  async onKey(domKey: string): Promise<void> {
    const key = KEY_OF_ARROW[domKey];
    if (!key || this.status !== "playing" || this.sessionId === null) {
      return;
    }
    try {
      const res = await this.transport.postKey(this.sessionId, key);
      this.absorb(res.world);
      await this.refreshScene();
    } catch {
      this.disconnect();
    }
  }

  async onTickTimer(): Promise<void> {
    // never stack a second tick behind a slow one
    if (this.status !== "playing" || this.sessionId === null || this.tickInFlight) {
      return;
    }
    this.tickInFlight = true;
    try {
      const res = await this.transport.postTick(this.sessionId);
      this.absorb(res.world);
      // render the final frame too, so the empty fuel bar is visible
      await this.refreshScene();
    } catch {
      this.disconnect();
    } finally {
      this.tickInFlight = false;
    }
  }

  // From "disconnected": resume the session, or start over if none exists.
  async retry(): Promise<void> {
    if (this.status !== "disconnected") {
      return;
    }
    if (this.sessionId === null) {
      await this.start(this.lastStart?.seed ?? 0, this.lastStart?.config);
      return;
    }
    try {
      await this.refreshScene();
      const resumed: Status = this.lastWorld?.over ? "over" : "playing";
      this.setStatus(resumed);
      if (resumed === "playing") {
        this.timer.start(1000 / this.ticksPerSecond, () => {
          void this.onTickTimer();
        });
      }
    } catch {
      this.disconnect();
    }
  }

  stop(): void {
    this.timer.stop();
    this.setStatus("idle");
  }

  private absorb(world: WorldView): void {
    this.lastWorld = world;
    if (world.over && this.status === "playing") {
      this.timer.stop();
      this.setStatus("over");
    }
  }

  private async refreshScene(): Promise<void> {
    if (this.sessionId === null) {
      return;
    }
    const scene = await this.transport.getScene(this.sessionId);
    this.lastScene = scene;
    this.render(scene);
  }

  private disconnect(): void {
    this.timer.stop();
    this.setStatus("disconnected");
  }

  private setStatus(status: Status): void {
    this.status = status;
    this.onStatus(status);
  }
}
