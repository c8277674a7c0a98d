/** Sound-effect hook points; the default implementation is silent. */

export interface SoundHooks {
  onMatch(): void;
  onLifeLost(): void;
  onGameOver(): void;
}

export const silentSounds: SoundHooks = {
  onMatch() {},
  onLifeLost() {},
  onGameOver() {},
};
