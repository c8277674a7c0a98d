/** Page bootstrap: menu, general/customized game, registration. */

import { ApiError, GatewayClient } from "./api.js";
import { CaptureLoop } from "./cadence.js";
import { captureFrame, startCamera } from "./camera.js";
import { RegistrationPage } from "./registration.js";
import { GameScene } from "./scene.js";
import { applyFrame, applySession, initialState } from "./state.js";
import type { ClientGameState } from "./state.js";

const api = new GatewayClient("");

function playerId(): string {
  let id = localStorage.getItem("emodrop-player");
  if (!id) {
    id = `player-${Math.random().toString(36).slice(2, 10)}`;
    localStorage.setItem("emodrop-player", id);
  }
  return id;
}

async function runGame(root: HTMLElement, mode: "general" | "customized") {
  let state: ClientGameState = initialState();
  const scene = new GameScene(root, {
    onReplay: () => void runGame(root, mode),
  });
  const canvas = document.createElement("canvas");
  await startCamera(scene.video);

  const session = await api.createSession(
    mode,
    mode === "customized" ? playerId() : undefined,
  );
  state = applySession(state, session);
  scene.render(state);

  const loop = new CaptureLoop({
    submit: async () => {
      const sessionId = state.sessionId;
      if (!sessionId) return "game_over";
      try {
        const frame = await api.submitFrame(
          sessionId,
          captureFrame(scene.video, canvas),
        );
        state = applyFrame(state, frame);
        scene.applyOutcome(frame);
        scene.render(state);
        return state.state === "over" ? "game_over" : "ok";
      } catch (error) {
        if (error instanceof ApiError) {
          if (error.code === "rate_limited") return "rate_limited";
          if (error.code === "no_face") return "ok"; // keep the cadence
          if (error.code === "session_over") {
            const snapshot = await api.getSession(sessionId);
            state = applySession(state, snapshot);
            scene.render(state);
            return "game_over";
          }
          throw error;
        }
        return "network_error";
      }
    },
    onPausedChange: (paused) => scene.setPaused(paused),
  });
  loop.start();

  const animate = () => {
    scene.updateBomb(Date.now() / 1000, state);
    if (state.state !== "over") requestAnimationFrame(animate);
  };
  requestAnimationFrame(animate);
}

async function runRegistration(root: HTMLElement) {
  const canvas = document.createElement("canvas");
  const page = new RegistrationPage(root, api, playerId(), {
    capture: () => captureFrame(page.video, canvas),
    onComplete: () => {
      location.hash = "#customized";
    },
  });
  await startCamera(page.video);
}

function renderMenu(root: HTMLElement) {
  root.innerHTML = `
    <div class="menu">
      <h1>emodrop</h1>
      <p>Match the falling emotion with your face before it lands.</p>
      <nav>
        <a href="#general">Play (general)</a>
        <a href="#register">Register templates</a>
        <a href="#customized">Play (customized)</a>
      </nav>
    </div>`;
}

async function route() {
  const root = document.getElementById("app");
  if (!root) return;
  try {
    switch (location.hash) {
      case "#general":
        await runGame(root, "general");
        break;
      case "#customized":
        await runGame(root, "customized");
        break;
      case "#register":
        await runRegistration(root);
        break;
      default:
        renderMenu(root);
    }
  } catch (error) {
    if (error instanceof ApiError && error.code === "unregistered_player") {
      location.hash = "#register";
      return;
    }
    root.innerHTML = `<div class="fatal-error">${String(error)}</div>`;
  }
}

window.addEventListener("hashchange", () => void route());
window.addEventListener("DOMContentLoaded", () => void route());
