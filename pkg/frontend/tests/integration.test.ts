// Scripted session against the real service: the client talks to a live
// Python server over HTTP, with every request recorded for the network
// assertions.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GameClient, Status, TickTimer } from "../src/client.js";
import {
  CommandResponse,
  CreateResponse,
  HttpTransport,
  SceneNode,
  Transport,
  toNumber,
} from "../src/protocol.js";

const PORT = 8929;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "uvicorn", "--factory", "recipekit.service:create_app", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/game/probe`);
      if (res.status === 404) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((r) => setTimeout(r, 200));
  }
}, 25_000);

afterAll(() => {
  server?.kill();
});

class ManualTimer implements TickTimer {
  callback: (() => void) | null = null;
  start(_interval: number, callback: () => void): void {
    this.callback = callback;
  }
  stop(): void {
    this.callback = null;
  }
  get running(): boolean {
    return this.callback !== null;
  }
}

class LoggingTransport implements Transport {
  log: string[] = [];
  constructor(private readonly inner: Transport) {}

  createGame(seed?: number, config?: Record<string, unknown>): Promise<CreateResponse> {
    this.log.push("POST /game");
    return this.inner.createGame(seed, config);
  }
  postKey(id: string, key: string): Promise<CommandResponse> {
    this.log.push(`POST /game/${id}/key ${key}`);
    return this.inner.postKey(id, key);
  }
  postTick(id: string): Promise<CommandResponse> {
    this.log.push(`POST /game/${id}/tick`);
    return this.inner.postTick(id);
  }
  getScene(id: string): Promise<SceneNode> {
    this.log.push(`GET /game/${id}/scene`);
    return this.inner.getScene(id);
  }
}

function makeClient(config?: Record<string, unknown>) {
  const transport = new LoggingTransport(new HttpTransport(BASE));
  const timer = new ManualTimer();
  const frames: SceneNode[] = [];
  const statuses: Status[] = [];
  const client = new GameClient(transport, (s) => frames.push(s), timer, {
    onStatus: (s) => statuses.push(s),
  });
  return { client, transport, timer, frames, statuses, config };
}

describe("live session", () => {
  it("ArrowLeft then tick moves the rocket five pixels left", async () => {
    const { client, frames } = makeClient();
    await client.start(42);
    expect(client.status).toBe("playing");
    expect(client.lastWorld).not.toBeNull();
    expect(frames.length).toBeGreaterThan(0);

    await client.onKey("ArrowLeft");
    expect(client.lastWorld!.dir).toBe("left");
    const before = toNumber(client.lastWorld!.rocket.x);
    await client.onTickTimer();
    const after = toNumber(client.lastWorld!.rocket.x);
    expect(after).toBe(before - 5);
  });

  it("renders server frames verbatim, fuel bar included", async () => {
    const { client, frames } = makeClient();
    await client.start(42);
    const scene = frames[frames.length - 1];
    // walk to the purple bar: place(bfuel, place(gfuel, place(bar, ...)))
    let node = scene as Extract<SceneNode, { op: "place" }>;
    expect(node.image).toMatchObject({ op: "circ", color: "red" });
    node = node.base as Extract<SceneNode, { op: "place" }>;
    expect(node.image).toMatchObject({ op: "rect", color: "green" });
    node = node.base as Extract<SceneNode, { op: "place" }>;
    expect(node.image).toMatchObject({ op: "rect", color: "purple", width: 100 });
    expect(toNumber(client.lastWorld!.flevel) * 10).toBe(100);
  });

  it("shows the overlay at empty fuel and posts no further ticks", async () => {
    const { client, transport, timer, statuses } = makeClient();
    // one unit of fuel, one unit drained per tick: over after one tick
    await client.start(7, { max_fuel: 1, tick_dec: 1 });
    expect(client.status).toBe("playing");
    await client.onTickTimer();
    expect(client.lastWorld!.over).toBe(true);
    expect(client.status).toBe("over");
    expect(statuses).toContain("over"); // the UI overlay keys off this
    expect(timer.running).toBe(false);

    const requestsAtGameOver = transport.log.length;
    // a laggy clock firing afterwards must not reach the network
    await client.onTickTimer();
    await client.onTickTimer();
    timer.callback?.();
    expect(transport.log.length).toBe(requestsAtGameOver);
    expect(transport.log.filter((l) => l.endsWith("/tick"))).toHaveLength(1);
  });

  it("never mutates game state locally", async () => {
    const { client } = makeClient();
    await client.start(123);
    const fromServer = JSON.stringify(client.lastWorld);
    const probe = new HttpTransport(BASE);
    const created = await probe.createGame(123);
    expect(JSON.stringify(created.world)).toBe(fromServer);
  });
});
