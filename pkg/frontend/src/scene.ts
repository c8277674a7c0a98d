/** Game scene rendering: preview, falling bomb, score, hearts, bars.
 *
 * Every number on screen comes from the state mirror; the bomb animates
 * toward the server-provided deadline, not a client constant.
 */

import { emotionGlyph, emotionIconUri, EMOTION_LABELS } from "./icons.js";
import type { SoundHooks } from "./sound.js";
import { silentSounds } from "./sound.js";
import type { ClientGameState } from "./state.js";
import type { FrameResponse } from "./types.js";

export interface SceneCallbacks {
  onReplay(): void;
  sounds?: SoundHooks;
}

export class GameScene {
  readonly video: HTMLVideoElement;
  private readonly bomb: HTMLDivElement;
  private readonly bombIcon: HTMLImageElement;
  private readonly score: HTMLDivElement;
  private readonly hearts: HTMLDivElement;
  private readonly bars: HTMLDivElement;
  private readonly banner: HTMLDivElement;
  private readonly overlay: HTMLDivElement;
  private readonly sounds: SoundHooks;

  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: SceneCallbacks,
  ) {
    this.sounds = callbacks.sounds ?? silentSounds;
    root.innerHTML = "";
    root.classList.add("game-scene");

    const preview = element("div", "preview top-left");
    this.video = document.createElement("video");
    this.video.autoplay = true;
    this.video.id = "camera-preview";
    preview.appendChild(this.video);

    this.score = element("div", "score top-right");
    this.score.textContent = "Score: 0";

    this.hearts = element("div", "hearts bottom-left");

    this.bomb = element("div", "bomb");
    this.bombIcon = document.createElement("img");
    this.bombIcon.className = "bomb-icon";
    this.bomb.appendChild(this.bombIcon);
    this.bomb.hidden = true;

    this.bars = element("div", "probability-bars bottom-right");
    for (const label of EMOTION_LABELS) {
      const bar = element("div", "bar");
      bar.dataset.emotion = label;
      const fill = element("div", "bar-fill");
      const caption = element("span", "bar-label");
      caption.textContent = emotionGlyph(label);
      bar.appendChild(fill);
      bar.appendChild(caption);
      this.bars.appendChild(bar);
    }

    this.banner = element("div", "network-banner");
    this.banner.textContent = "Connection lost, retrying…";
    this.banner.hidden = true;

    this.overlay = element("div", "game-over-overlay");
    this.overlay.hidden = true;

    for (const node of [preview, this.score, this.hearts, this.bomb,
                        this.bars, this.banner, this.overlay]) {
      root.appendChild(node);
    }
  }

  render(state: ClientGameState): void {
    this.score.textContent = `Score: ${state.score}`;

    this.hearts.innerHTML = "";
    for (let i = 0; i < state.lives; i++) {
      const heart = element("span", "heart");
      heart.textContent = "❤";
      this.hearts.appendChild(heart);
    }

    if (state.target && state.state === "running") {
      this.bomb.hidden = false;
      this.bombIcon.src = emotionIconUri(state.target.emotion);
      this.bombIcon.alt = state.target.emotion;
      this.bomb.dataset.emotion = state.target.emotion;
    } else {
      this.bomb.hidden = true;
    }

    if (state.bars) {
      for (const bar of Array.from(this.bars.children) as HTMLElement[]) {
        const label = bar.dataset.emotion as keyof typeof state.bars;
        const value = state.bars[label] ?? 0;
        const fill = bar.querySelector<HTMLElement>(".bar-fill");
        if (fill) fill.style.height = `${Math.round(value * 100)}%`;
      }
    }

    if (state.state === "over") {
      this.showGameOver(state.finalScore ?? state.score);
    } else {
      this.overlay.hidden = true;
    }
  }

  /** Move the bomb along its fall using the server deadline. */
  updateBomb(nowSeconds: number, state: ClientGameState): void {
    const target = state.target;
    if (!target || state.state !== "running") return;
    const span = target.deadline - target.spawn_time;
    const progress = span <= 0
      ? 1
      : Math.min(1, Math.max(0, (nowSeconds - target.spawn_time) / span));
    this.bomb.style.top = `${(progress * 85).toFixed(1)}%`;
  }

  /** Apply one frame response: sounds and transient effects. */
  applyOutcome(frame: FrameResponse): void {
    if (frame.matched) this.sounds.onMatch();
    for (const event of frame.events) {
      if (event.type === "life_lost") this.sounds.onLifeLost();
      if (event.type === "game_over") this.sounds.onGameOver();
    }
  }

  setPaused(paused: boolean): void {
    this.banner.hidden = !paused;
  }

  private showGameOver(finalScore: number): void {
    this.overlay.hidden = false;
    this.overlay.innerHTML = "";
    const sign = element("div", "game-over-sign");
    sign.textContent = "Game Over";
    const total = element("div", "final-score");
    total.textContent = `Total score: ${finalScore}`;
    const replay = document.createElement("button");
    replay.className = "replay-button";
    replay.textContent = "Replay";
    replay.addEventListener("click", () => this.callbacks.onReplay());
    this.overlay.appendChild(sign);
    this.overlay.appendChild(total);
    this.overlay.appendChild(replay);
  }
}

function element(tag: string, className: string): HTMLDivElement {
  const node = document.createElement(tag) as HTMLDivElement;
  node.className = className;
  return node;
}
