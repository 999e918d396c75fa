// Wire types for the game service. Rationals arrive as integers or
// "num/den" strings; the client converts them to numbers for drawing only
// and never does game arithmetic of its own.

export type Rational = number | string;

export interface PosnView {
  x: Rational;
  y: Rational;
}

export interface WorldView {
  rocket: PosnView;
  dir: string;
  flevel: Rational;
  gfuel: PosnView;
  bfuel: PosnView;
  over: boolean;
}

export type SceneNode =
  | { op: "empty"; width: Rational; height: Rational }
  | { op: "rect"; width: Rational; height: Rational; mode: string; color: string }
  | { op: "circ"; radius: Rational; mode: string; color: string }
  | { op: "rotate"; degrees: Rational; image: SceneNode }
  | { op: "place"; image: SceneNode; x: Rational; y: Rational; base: SceneNode };

export interface CommandResponse {
  world: WorldView;
  over: boolean;
}

export interface CreateResponse {
  id: string;
  world: WorldView;
}

export function toNumber(r: Rational): number {
  if (typeof r === "number") {
    return r;
  }
  const slash = r.indexOf("/");
  if (slash < 0) {
    return Number(r);
  }
  return Number(r.slice(0, slash)) / Number(r.slice(slash + 1));
}

export interface Transport {
  createGame(seed?: number, config?: Record<string, unknown>): Promise<CreateResponse>;
  postKey(id: string, key: string): Promise<CommandResponse>;
  postTick(id: string): Promise<CommandResponse>;
  getScene(id: string): Promise<SceneNode>;
}

export class HttpError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class HttpTransport implements Transport {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await res.json();
    if (!res.ok) {
      throw new HttpError(res.status, body.error ?? res.statusText);
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload ?? {}),
    });
  }

  createGame(seed = 0, config?: Record<string, unknown>): Promise<CreateResponse> {
    return this.post("/game", config ? { seed, config } : { seed });
  }

  postKey(id: string, key: string): Promise<CommandResponse> {
    return this.post(`/game/${id}/key`, { key });
  }

  postTick(id: string): Promise<CommandResponse> {
    return this.post(`/game/${id}/tick`);
  }

  getScene(id: string): Promise<SceneNode> {
    return this.request(`/game/${id}/scene`);
  }
}
