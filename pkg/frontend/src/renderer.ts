// Canvas interpreter for the server's scene graph. Every frame is a pure
// function of the scene JSON: the client adds nothing of its own.

import { SceneNode, toNumber } from "./protocol.js";

// The slice of CanvasRenderingContext2D the renderer needs, so tests can
// substitute a recorder.
export interface Context2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  save(): void;
  restore(): void;
  translate(x: number, y: number): void;
  rotate(angle: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
}

export function sceneSize(scene: SceneNode): { width: number; height: number } {
  switch (scene.op) {
    case "empty":
      return { width: toNumber(scene.width), height: toNumber(scene.height) };
    case "rect":
      return { width: toNumber(scene.width), height: toNumber(scene.height) };
    case "circ": {
      const d = 2 * toNumber(scene.radius);
      return { width: d, height: d };
    }
    case "rotate": {
      const inner = sceneSize(scene.image);
      const quarter = ((toNumber(scene.degrees) % 360) + 360) % 360;
      if (quarter === 90 || quarter === 270) {
        return { width: inner.height, height: inner.width };
      }
      return inner;
    }
    case "place":
      return sceneSize(scene.base);
  }
}

export function renderScene(ctx: Context2D, scene: SceneNode): void {
  switch (scene.op) {
    case "empty": {
      ctx.clearRect(0, 0, toNumber(scene.width), toNumber(scene.height));
      return;
    }
    case "place": {
      renderScene(ctx, scene.base); // base sits underneath
      drawImageAt(ctx, scene.image, toNumber(scene.x), toNumber(scene.y));
      return;
    }
    default:
      // a bare image as the whole scene: draw it at its own center
      drawImageAt(ctx, scene, 0, 0);
  }
}

// Images are positioned by their center, matching place-image semantics.
function drawImageAt(ctx: Context2D, image: SceneNode, cx: number, cy: number): void {
  switch (image.op) {
    case "rect": {
      const w = toNumber(image.width);
      const h = toNumber(image.height);
      if (image.mode === "solid") {
        ctx.fillStyle = image.color;
        ctx.fillRect(cx - w / 2, cy - h / 2, w, h);
      } else {
        ctx.strokeStyle = image.color;
        ctx.strokeRect(cx - w / 2, cy - h / 2, w, h);
      }
      return;
    }
    case "circ": {
      const r = toNumber(image.radius);
      ctx.beginPath();
      ctx.arc(cx, cy, r, 0, 2 * Math.PI);
      if (image.mode === "solid") {
        ctx.fillStyle = image.color;
        ctx.fill();
      } else {
        ctx.strokeStyle = image.color;
        ctx.stroke();
      }
      return;
    }
    case "rotate": {
      // the language rotates counterclockwise; canvas angles run clockwise
      ctx.save();
      ctx.translate(cx, cy);
      ctx.rotate((-toNumber(image.degrees) * Math.PI) / 180);
      drawImageAt(ctx, image.image, 0, 0);
      ctx.restore();
      return;
    }
    case "place": {
      // nested composite: draw its base, then its image, both offset
      drawImageAt(ctx, image.base, cx, cy);
      drawImageAt(ctx, image.image, cx + toNumber(image.x), cy + toNumber(image.y));
      return;
    }
    case "empty":
      return;
  }
}
