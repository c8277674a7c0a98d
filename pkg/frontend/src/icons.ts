/** Bundled emotion icons, canonical order; swap this module for custom art. */

import { EMOTION_LABELS, type EmotionLabel } from "./types.js";

const GLYPHS: Record<EmotionLabel, string> = {
  angry: "\u{1F620}",
  disgust: "\u{1F922}",
  fear: "\u{1F628}",
  happy: "\u{1F604}",
  neutral: "\u{1F610}",
  sad: "\u{1F622}",
  surprise: "\u{1F62E}",
};

/** Standalone SVG image for an emotion icon (usable as an <img> src). */
export function emotionIconUri(label: EmotionLabel): string {
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" width="64" height="64">` +
    `<circle cx="32" cy="32" r="30" fill="#20242c"/>` +
    `<text x="32" y="42" font-size="34" text-anchor="middle">${GLYPHS[label]}</text>` +
    `</svg>`;
  return `data:image/svg+xml;utf8,${encodeURIComponent(svg)}`;
}

export function emotionGlyph(label: EmotionLabel): string {
  return GLYPHS[label];
}

export { EMOTION_LABELS };
