import { beforeEach, describe, expect, it, vi } from "vitest";

import { GatewayClient } from "../src/api.js";
import { RegistrationPage } from "../src/registration.js";
import { EMOTION_LABELS } from "../src/types.js";

import { jsonResponse } from "./helpers.js";

function makePage(fetchFn: (url: string, init?: RequestInit) => Promise<Response>) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const api = new GatewayClient("", fetchFn);
  const onComplete = vi.fn();
  const page = new RegistrationPage(root, api, "tester", {
    capture: () => "UEFZTE9BRA==",
    onComplete,
  });
  return { root, page, onComplete };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("registration page", () => {
  it("renders 8 subareas: the live stream plus one per emotion", () => {
    const { root } = makePage(async () => jsonResponse({}));
    const subareas = root.querySelectorAll(".subarea");
    expect(subareas).toHaveLength(8);
    expect(root.querySelector(".subarea.live-stream video")).not.toBeNull();
    const labels = Array.from(
      root.querySelectorAll<HTMLElement>(".subarea.template"),
      (el) => el.dataset.emotion,
    );
    expect(labels).toEqual([...EMOTION_LABELS]);
  });

  it("click-to-capture registers the emotion and previews the capture", async () => {
    const urls: string[] = [];
    const { root, page } = makePage(async (url, init) => {
      urls.push(url);
      expect(JSON.parse(String(init?.body)).image).toBe("UEFZTE9BRA==");
      return jsonResponse({
        player_id: "tester", registered: ["sad"], missing: [], complete: false,
      });
    });
    await page.captureTemplate("sad");
    expect(urls).toEqual(["/api/players/tester/templates/sad"]);
    const subarea = root.querySelector<HTMLElement>('.subarea[data-emotion="sad"]');
    expect(subarea?.classList.contains("captured")).toBe(true);
    const img = subarea?.querySelector<HTMLImageElement>(".template-capture");
    expect(img?.hidden).toBe(false);
  });

  it("no_face flags the named emotion for recapture", async () => {
    const { root, page } = makePage(async () =>
      jsonResponse(
        { code: "no_face", message: "recapture", retryable: true, emotion: "fear" },
        422,
      ),
    );
    await page.captureTemplate("fear");
    const subarea = root.querySelector<HTMLElement>('.subarea[data-emotion="fear"]');
    expect(subarea?.classList.contains("needs-recapture")).toBe(true);
    expect(root.querySelector(".registration-message")?.textContent).toContain("fear");
  });

  it("Send All with missing emotions lists them inline", async () => {
    const { root, page, onComplete } = makePage(async () =>
      jsonResponse(
        {
          code: "incomplete_registration",
          message: "missing",
          retryable: false,
          missing: ["disgust", "surprise"],
        },
        409,
      ),
    );
    await page.sendAllTemplates();
    expect(onComplete).not.toHaveBeenCalled();
    const message = root.querySelector(".registration-message")?.textContent;
    expect(message).toContain("disgust");
    expect(message).toContain("surprise");
    expect(
      root.querySelector('.subarea[data-emotion="disgust"]')?.classList
        .contains("needs-recapture"),
    ).toBe(true);
    expect(
      root.querySelector('.subarea[data-emotion="happy"]')?.classList
        .contains("needs-recapture"),
    ).toBe(false);
  });

  it("Send All success completes and hands off", async () => {
    const state = {
      player_id: "tester",
      registered: [...EMOTION_LABELS],
      missing: [],
      complete: true,
    };
    const { page, onComplete } = makePage(async () => jsonResponse(state));
    await page.sendAllTemplates();
    expect(onComplete).toHaveBeenCalledWith(state);
  });
});
