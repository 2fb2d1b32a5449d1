/**
 * The six annotation axes.
 *
 * Each axis is one component of a 3-vector in [-1, 1]; a track is either a
 * per-character "discourse" track or the film-wide "story" track. Pole
 * labels let the buttons read naturally in both directions (e.g. a negative
 * justice entry is "got away with it", not "justice: -0.4").
 */

export type TrackKind = "discourse" | "story";

export interface AxisInfo {
  /** Component index in the server's 3-vector. */
  readonly index: 0 | 1 | 2;
  readonly kind: TrackKind;
  readonly name: string;
  readonly positivePole: string;
  readonly negativePole: string;
  /** Strip/curve color convention: index 0 red, 1 green, 2 blue. */
  readonly color: string;
}

export const AXES: readonly AxisInfo[] = [
  {
    index: 0,
    kind: "discourse",
    name: "concern",
    positivePole: "concern",
    negativePole: "envy",
    color: "#ff0000",
  },
  {
    index: 1,
    kind: "discourse",
    name: "endearment",
    positivePole: "love/flattering",
    negativePole: "hate/unflattering",
    color: "#008000",
  },
  {
    index: 2,
    kind: "discourse",
    name: "justice",
    positivePole: "comeuppance",
    negativePole: "got away with it",
    color: "#0000ff",
  },
  {
    index: 0,
    kind: "story",
    name: "curiosity",
    positivePole: "curiosity",
    negativePole: "apathy",
    color: "#ff0000",
  },
  {
    index: 1,
    kind: "story",
    name: "surprise",
    positivePole: "surprise",
    negativePole: "predictable",
    color: "#008000",
  },
  {
    index: 2,
    kind: "story",
    name: "clarity",
    positivePole: "clarity",
    negativePole: "confusion",
    color: "#0000ff",
  },
] as const;

export const COMBINED_COLOR = "#000000";

export function axesFor(kind: TrackKind): readonly AxisInfo[] {
  return AXES.filter((a) => a.kind === kind);
}

/** Button caption for an axis at the current slider sign. */
export function axisLabel(axis: AxisInfo, magnitude: number): string {
  return magnitude < 0 ? axis.negativePole : axis.positivePole;
}

export const MAGNITUDE_STEP = 0.05;

/** Snap a slider value to the 0.05 grid and clamp into [-1, 1]. */
export function snapMagnitude(raw: number): number {
  const clamped = Math.max(-1, Math.min(1, raw));
  return Math.round(clamped / MAGNITUDE_STEP) * MAGNITUDE_STEP;
}
