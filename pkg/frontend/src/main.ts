// Browser wiring: canvas, keyboard, status line, game-over overlay.

import { GameClient, IntervalTimer, Status } from "./client.js";
import { HttpTransport } from "./protocol.js";
import { renderScene, sceneSize } from "./renderer.js";

const params = new URLSearchParams(location.search);
const seed = Number(params.get("seed") ?? Date.now() % 2 ** 32);
const serviceUrl = params.get("service") ?? "";
const ticksPerSecond = Number(params.get("tps") ?? 28);

const root = document.getElementById("app") ?? document.body;

const statusLine = document.createElement("div");
statusLine.className = "status";

const stage = document.createElement("div");
stage.className = "stage";

const canvas = document.createElement("canvas");
canvas.width = 500;
canvas.height = 500;

const overlay = document.createElement("div");
overlay.className = "overlay";
overlay.textContent = "game over";
overlay.hidden = true;

const retryButton = document.createElement("button");
retryButton.textContent = "reconnect";
retryButton.hidden = true;

stage.append(canvas, overlay);
root.append(statusLine, stage, retryButton);

const ctx = canvas.getContext("2d");
if (!ctx) {
  throw new Error("canvas 2d context unavailable");
}

const client = new GameClient(
  new HttpTransport(serviceUrl),
  (scene) => {
    const size = sceneSize(scene);
    if (canvas.width !== size.width || canvas.height !== size.height) {
      canvas.width = size.width;
      canvas.height = size.height;
    }
    renderScene(ctx, scene);
  },
  new IntervalTimer(),
  { ticksPerSecond, onStatus: showStatus },
);

function showStatus(status: Status): void {
  statusLine.textContent = `status: ${status} (seed ${seed})`;
  overlay.hidden = status !== "over";
  retryButton.hidden = status !== "disconnected";
}

document.addEventListener("keydown", (event: KeyboardEvent) => {
  if (event.key.startsWith("Arrow")) {
    event.preventDefault();
    void client.onKey(event.key);
  }
});

retryButton.addEventListener("click", () => {
  void client.retry();
});

void client.start(seed);
