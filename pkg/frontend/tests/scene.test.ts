import { beforeEach, describe, expect, it, vi } from "vitest";

import { GameScene } from "../src/scene.js";
import { applyFrame, applySession, initialState } from "../src/state.js";

import { frame, session, target } from "./helpers.js";

function makeScene(onReplay = () => {}) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const sounds = { onMatch: vi.fn(), onLifeLost: vi.fn(), onGameOver: vi.fn() };
  const scene = new GameScene(root, { onReplay, sounds });
  return { root, scene, sounds };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("game scene", () => {
  it("anchors preview top-left, score top-right, hearts bottom-left", () => {
    const { root, scene } = makeScene();
    scene.render(applySession(initialState(), session()));
    const preview = root.querySelector(".preview");
    expect(preview?.classList.contains("top-left")).toBe(true);
    expect(preview?.querySelector("video")).not.toBeNull();
    expect(root.querySelector(".score")?.classList.contains("top-right")).toBe(true);
    expect(root.querySelector(".hearts")?.classList.contains("bottom-left")).toBe(true);
  });

  it("renders one heart per server life (5 lives -> 5 hearts)", () => {
    const { root, scene } = makeScene();
    scene.render(applySession(initialState(), session({ lives: 5 })));
    expect(root.querySelectorAll(".heart")).toHaveLength(5);
    scene.render(applySession(initialState(), session({ lives: 2 })));
    expect(root.querySelectorAll(".heart")).toHaveLength(2);
  });

  it("shows the server score and the active bomb icon", () => {
    const { root, scene } = makeScene();
    scene.render(applySession(initialState(),
      session({ score: 12, target: target("disgust") })));
    expect(root.querySelector(".score")?.textContent).toBe("Score: 12");
    const bomb = root.querySelector<HTMLElement>(".bomb");
    expect(bomb?.hidden).toBe(false);
    expect(bomb?.dataset.emotion).toBe("disgust");
  });

  it("renders seven probability bars fed by the last score vector", () => {
    const { root, scene } = makeScene();
    let state = applySession(initialState(), session());
    state = applyFrame(state, frame({
      scores: {
        angry: 0, disgust: 0, fear: 0, happy: 1,
        neutral: 0, sad: 0, surprise: 0,
      },
    }));
    scene.render(state);
    const bars = root.querySelectorAll(".bar");
    expect(bars).toHaveLength(7);
    const happyFill = root.querySelector<HTMLElement>(
      '.bar[data-emotion="happy"] .bar-fill');
    expect(happyFill?.style.height).toBe("100%");
  });

  it("animates the bomb toward the server deadline", () => {
    const { root, scene } = makeScene();
    const state = applySession(initialState(),
      session({ target: target("fear", 100, 110) }));
    scene.render(state);
    const bomb = root.querySelector<HTMLElement>(".bomb")!;
    scene.updateBomb(100, state);
    expect(bomb.style.top).toBe("0.0%");
    scene.updateBomb(105, state);
    expect(bomb.style.top).toBe("42.5%");
    scene.updateBomb(115, state); // clamped past the deadline
    expect(bomb.style.top).toBe("85.0%");
  });

  it("fires the sound hook on match and removes the bomb at game over", () => {
    const { root, scene, sounds } = makeScene();
    let state = applySession(initialState(), session());
    const matchFrame = frame({ matched: true, status: "match", score: 1 });
    state = applyFrame(state, matchFrame);
    scene.applyOutcome(matchFrame);
    scene.render(state);
    expect(sounds.onMatch).toHaveBeenCalledOnce();

    const overFrame = frame({
      state: "over", lives: 0, score: 1, target: null,
      events: [{ type: "game_over", at: 9, final_score: 1 }],
    });
    state = applyFrame(state, overFrame);
    scene.applyOutcome(overFrame);
    scene.render(state);
    expect(sounds.onGameOver).toHaveBeenCalledOnce();
    expect(root.querySelector<HTMLElement>(".bomb")?.hidden).toBe(true);
  });

  it("game over shows the sign, the total score, and a working Replay", () => {
    const onReplay = vi.fn();
    const { root, scene } = makeScene(onReplay);
    let state = applySession(initialState(), session());
    state = applyFrame(state, frame({
      state: "over", lives: 0, score: 4, target: null,
      events: [{ type: "game_over", at: 3, final_score: 4 }],
    }));
    scene.render(state);
    expect(root.querySelector(".game-over-sign")?.textContent).toBe("Game Over");
    expect(root.querySelector(".final-score")?.textContent).toBe("Total score: 4");
    const replay = root.querySelector<HTMLButtonElement>(".replay-button");
    expect(replay).not.toBeNull();
    replay!.click();
    expect(onReplay).toHaveBeenCalledOnce();
  });

  it("shows the network banner only while paused", () => {
    const { root, scene } = makeScene();
    const banner = root.querySelector<HTMLElement>(".network-banner")!;
    expect(banner.hidden).toBe(true);
    scene.setPaused(true);
    expect(banner.hidden).toBe(false);
    scene.setPaused(false);
    expect(banner.hidden).toBe(true);
  });
});
