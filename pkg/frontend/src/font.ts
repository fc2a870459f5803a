/** Tiny 5x7 bitmap font covering the characters used in plot labels. */

import type { Raster } from "./png.js";

const GLYPHS: Record<string, string[]> = {
  " ": ["     ", "     ", "     ", "     ", "     ", "     ", "     "],
  "0": [" XXX ", "X   X", "X  XX", "X X X", "XX  X", "X   X", " XXX "],
  "1": ["  X  ", " XX  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "],
  "2": [" XXX ", "X   X", "    X", "   X ", "  X  ", " X   ", "XXXXX"],
  "3": [" XXX ", "X   X", "    X", "  XX ", "    X", "X   X", " XXX "],
  "4": ["   X ", "  XX ", " X X ", "X  X ", "XXXXX", "   X ", "   X "],
  "5": ["XXXXX", "X    ", "XXXX ", "    X", "    X", "X   X", " XXX "],
  "6": [" XXX ", "X    ", "X    ", "XXXX ", "X   X", "X   X", " XXX "],
  "7": ["XXXXX", "    X", "   X ", "  X  ", "  X  ", "  X  ", "  X  "],
  "8": [" XXX ", "X   X", "X   X", " XXX ", "X   X", "X   X", " XXX "],
  "9": [" XXX ", "X   X", "X   X", " XXXX", "    X", "    X", " XXX "],
  "-": ["     ", "     ", "     ", "XXXXX", "     ", "     ", "     "],
  "+": ["     ", "  X  ", "  X  ", "XXXXX", "  X  ", "  X  ", "     "],
  ".": ["     ", "     ", "     ", "     ", "     ", " XX  ", " XX  "],
  ",": ["     ", "     ", "     ", "     ", " XX  ", "  X  ", " X   "],
  "=": ["     ", "     ", "XXXXX", "     ", "XXXXX", "     ", "     "],
  "_": ["     ", "     ", "     ", "     ", "     ", "     ", "XXXXX"],
  ":": ["     ", " XX  ", " XX  ", "     ", " XX  ", " XX  ", "     "],
  "(": ["   X ", "  X  ", " X   ", " X   ", " X   ", "  X  ", "   X "],
  ")": [" X   ", "  X  ", "   X ", "   X ", "   X ", "  X  ", " X   "],
  "[": [" XXX ", " X   ", " X   ", " X   ", " X   ", " X   ", " XXX "],
  "]": [" XXX ", "   X ", "   X ", "   X ", "   X ", "   X ", " XXX "],
  a: ["     ", "     ", " XXX ", "    X", " XXXX", "X   X", " XXXX"],
  b: ["X    ", "X    ", "XXXX ", "X   X", "X   X", "X   X", "XXXX "],
  c: ["     ", "     ", " XXXX", "X    ", "X    ", "X    ", " XXXX"],
  d: ["    X", "    X", " XXXX", "X   X", "X   X", "X   X", " XXXX"],
  e: ["     ", "     ", " XXX ", "X   X", "XXXXX", "X    ", " XXX "],
  f: ["  XX ", " X   ", "XXXX ", " X   ", " X   ", " X   ", " X   "],
  g: ["     ", " XXXX", "X   X", "X   X", " XXXX", "    X", " XXX "],
  h: ["X    ", "X    ", "XXXX ", "X   X", "X   X", "X   X", "X   X"],
  i: ["  X  ", "     ", " XX  ", "  X  ", "  X  ", "  X  ", " XXX "],
  j: ["   X ", "     ", "  XX ", "   X ", "   X ", "X  X ", " XX  "],
  k: ["X    ", "X    ", "X  X ", "X X  ", "XX   ", "X X  ", "X  X "],
  l: [" XX  ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "],
  m: ["     ", "     ", "XX X ", "X X X", "X X X", "X X X", "X X X"],
  n: ["     ", "     ", "XXXX ", "X   X", "X   X", "X   X", "X   X"],
  o: ["     ", "     ", " XXX ", "X   X", "X   X", "X   X", " XXX "],
  p: ["     ", "XXXX ", "X   X", "X   X", "XXXX ", "X    ", "X    "],
  q: ["     ", " XXXX", "X   X", "X   X", " XXXX", "    X", "    X"],
  r: ["     ", "     ", "X XX ", "XX   ", "X    ", "X    ", "X    "],
  s: ["     ", "     ", " XXXX", "X    ", " XXX ", "    X", "XXXX "],
  t: [" X   ", " X   ", "XXXX ", " X   ", " X   ", " X   ", "  XX "],
  u: ["     ", "     ", "X   X", "X   X", "X   X", "X   X", " XXXX"],
  v: ["     ", "     ", "X   X", "X   X", "X   X", " X X ", "  X  "],
  w: ["     ", "     ", "X X X", "X X X", "X X X", "X X X", " X X "],
  x: ["     ", "     ", "X   X", " X X ", "  X  ", " X X ", "X   X"],
  y: ["     ", "X   X", "X   X", " XXXX", "    X", "X   X", " XXX "],
  z: ["     ", "     ", "XXXXX", "   X ", "  X  ", " X   ", "XXXXX"],
  N: ["X   X", "XX  X", "XX  X", "X X X", "X  XX", "X  XX", "X   X"],
  X: ["X   X", "X   X", " X X ", "  X  ", " X X ", "X   X", "X   X"],
};

export const GLYPH_WIDTH = 6; // 5 pixels + 1 spacing
export const GLYPH_HEIGHT = 8;

export function drawText(
  raster: Raster,
  x: number,
  y: number,
  text: string,
  rgb: readonly [number, number, number] = [0, 0, 0],
): void {
  let cx = x;
  for (const ch of text) {
    const glyph = GLYPHS[ch] ?? GLYPHS[ch.toLowerCase()] ?? GLYPHS[" "];
    for (let row = 0; row < 7; row++) {
      for (let col = 0; col < 5; col++) {
        if (glyph[row][col] === "X") raster.set(cx + col, y + row, rgb);
      }
    }
    cx += GLYPH_WIDTH;
  }
}

/** Vertical text, one character under the next (for the y-axis label). */
export function drawTextVertical(
  raster: Raster,
  x: number,
  y: number,
  text: string,
  rgb: readonly [number, number, number] = [0, 0, 0],
): void {
  let cy = y;
  for (const ch of text) {
    drawText(raster, x, cy, ch, rgb);
    cy += GLYPH_HEIGHT;
  }
}
