/** Registration page: 8 subareas (live stream + the seven templates).
 *
 * Clicking an emotion subarea captures the current camera frame as that
 * emotion's template; capture can be repeated until the player is happy.
 * "Send All" completes registration; a no_face reply flags the named
 * emotion for recapture, an incomplete reply lists what is missing.
 */

import { ApiError, GatewayClient } from "./api.js";
import { emotionGlyph, EMOTION_LABELS } from "./icons.js";
import type { EmotionLabel, RegistrationState } from "./types.js";

export interface RegistrationCallbacks {
  /** returns base64 PNG of the current camera frame */
  capture(): string;
  onComplete(state: RegistrationState): void;
}

export class RegistrationPage {
  readonly video: HTMLVideoElement;
  private readonly subareas = new Map<EmotionLabel, HTMLDivElement>();
  private readonly message: HTMLDivElement;
  private readonly sendAll: HTMLButtonElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: GatewayClient,
    private readonly playerId: string,
    private readonly callbacks: RegistrationCallbacks,
  ) {
    root.innerHTML = "";
    root.classList.add("registration-page");

    const grid = document.createElement("div");
    grid.className = "registration-grid";

    const live = document.createElement("div");
    live.className = "subarea live-stream";
    this.video = document.createElement("video");
    this.video.autoplay = true;
    live.appendChild(this.video);
    const liveCaption = document.createElement("span");
    liveCaption.className = "subarea-caption";
    liveCaption.textContent = "live";
    live.appendChild(liveCaption);
    grid.appendChild(live);

    for (const label of EMOTION_LABELS) {
      const subarea = document.createElement("div");
      subarea.className = "subarea template";
      subarea.dataset.emotion = label;
      const image = document.createElement("img");
      image.className = "template-capture";
      image.hidden = true;
      const caption = document.createElement("span");
      caption.className = "subarea-caption";
      caption.textContent = `${emotionGlyph(label)} ${label}`;
      subarea.appendChild(image);
      subarea.appendChild(caption);
      subarea.addEventListener("click", () => void this.captureTemplate(label));
      grid.appendChild(subarea);
      this.subareas.set(label, subarea);
    }

    this.message = document.createElement("div");
    this.message.className = "registration-message";

    this.sendAll = document.createElement("button");
    this.sendAll.className = "send-all-button";
    this.sendAll.textContent = "Send All";
    this.sendAll.addEventListener("click", () => void this.sendAllTemplates());

    root.appendChild(grid);
    root.appendChild(this.sendAll);
    root.appendChild(this.message);
  }

  async captureTemplate(label: EmotionLabel): Promise<void> {
    const subarea = this.subareas.get(label);
    if (!subarea) return;
    try {
      const payload = this.callbacks.capture();
      const state = await this.api.registerTemplate(this.playerId, label, payload);
      subarea.classList.remove("needs-recapture");
      subarea.classList.add("captured");
      const image = subarea.querySelector<HTMLImageElement>(".template-capture");
      if (image) {
        image.hidden = false;
        image.src = `data:image/png;base64,${payload}`;
      }
      this.message.textContent =
        `${state.registered.length}/7 registered`;
    } catch (error) {
      if (error instanceof ApiError && error.code === "no_face") {
        this.flagRecapture(error.body.emotion ?? label);
        return;
      }
      throw error;
    }
  }

  async sendAllTemplates(): Promise<void> {
    try {
      const state = await this.api.completeRegistration(this.playerId);
      this.message.textContent = "registration complete";
      this.callbacks.onComplete(state);
    } catch (error) {
      if (error instanceof ApiError && error.code === "incomplete_registration") {
        const missing = error.body.missing ?? [];
        this.message.textContent = `still missing: ${missing.join(", ")}`;
        for (const label of missing) {
          this.subareas.get(label)?.classList.add("needs-recapture");
        }
        return;
      }
      throw error;
    }
  }

  flagRecapture(label: EmotionLabel): void {
    this.subareas.get(label)?.classList.add("needs-recapture");
    this.message.textContent =
      `no face detected for ${label}; please recapture`;
  }
}
