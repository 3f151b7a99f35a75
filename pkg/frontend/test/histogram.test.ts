import { describe, expect, it } from 'vitest'
import { convArgmaxHistogram, positiveMaximumCount } from '../src/histogram'
import { ExporterError } from '../src/errors'
import { makeRng } from './util'

function grid(height: number, width: number, channels: number, values: number[]) {
  return { height, width, channels, values }
}

describe('hand-built cases', () => {
  it('counts one bin per positively-firing map', () => {
    // Two maps over a 2x2 grid: map 0 peaks at (0,1), map 1 at (1,0).
    const g = grid(2, 2, 2, [
      0.1, 0.0, /* (0,0) */ 0.9, 0.2 /* (0,1) */,
      0.3, 0.8, /* (1,0) */ 0.2, 0.1 /* (1,1) */,
    ])
    expect(Array.from(convArgmaxHistogram(g))).toEqual([0, 1, 1, 0])
  })

  it('ignores maps whose maximum is zero or negative', () => {
    const allZero = grid(2, 2, 1, [0, 0, 0, 0])
    expect(Array.from(convArgmaxHistogram(allZero))).toEqual([0, 0, 0, 0])
    const negative = grid(1, 3, 1, [-5, -1, -2])
    expect(Array.from(convArgmaxHistogram(negative))).toEqual([0, 0, 0])
    // Strictly positive: map 0 peaks at exactly 0 and contributes nothing;
    // only map 1 (peak 1 at position 0) lands a count.
    const zeroPeak = grid(1, 2, 2, [0, 1, -3, 0.5])
    expect(Array.from(convArgmaxHistogram(zeroPeak))).toEqual([1, 0])
  })

  it('breaks ties toward the first row-major position', () => {
    const tied = grid(2, 2, 1, [0.5, 0.7, 0.7, 0.1])
    expect(Array.from(convArgmaxHistogram(tied))).toEqual([0, 1, 0, 0])
  })

  it('accumulates counts when maps share a peak position', () => {
    const shared = grid(1, 2, 3, [1, 2, 3, 0.5, 0.4, 0.1])
    // Maps 0, 1, 2 all peak at position 0.
    expect(Array.from(convArgmaxHistogram(shared))).toEqual([3, 0])
  })

  it('marks occupancy instead of counting in binary mode', () => {
    const shared = grid(1, 2, 3, [1, 2, 3, 0.5, 0.4, 0.1])
    expect(Array.from(convArgmaxHistogram(shared, true))).toEqual([1, 0])
  })

  it('rejects empty and mis-sized grids', () => {
    expect(() => convArgmaxHistogram(grid(0, 2, 1, []))).toThrow(ExporterError)
    expect(() => convArgmaxHistogram(grid(2, 2, 1, [1, 2, 3]))).toThrow(/expected 4/)
  })
})

describe('bin-sum counting identity', () => {
  it('holds for 100 random activation tensors', () => {
    const rng = makeRng(0xfeed)
    for (let round = 0; round < 100; round++) {
      const height = 1 + Math.floor(rng() * 8)
      const width = 1 + Math.floor(rng() * 8)
      const channels = 1 + Math.floor(rng() * 32)
      const values = new Array<number>(height * width * channels)
      for (let i = 0; i < values.length; i++) {
        // Mix of negatives, exact zeros, and positives.
        const draw = rng()
        values[i] = draw < 0.25 ? 0 : (draw - 0.5) * 4
      }
      const g = grid(height, width, channels, values)
      const bins = convArgmaxHistogram(g)

      // Independent recount, channel by channel, straight off the raw values.
      let positiveMaps = 0
      for (let c = 0; c < channels; c++) {
        let max = -Infinity
        for (let p = 0; p < height * width; p++) {
          max = Math.max(max, values[p * channels + c])
        }
        if (max > 0) positiveMaps++
      }

      const binSum = bins.reduce((a, b) => a + b, 0)
      expect(binSum).toBe(positiveMaps)
      expect(positiveMaximumCount(g)).toBe(positiveMaps)
      expect(bins.length).toBe(height * width)
      for (const b of bins) {
        expect(Number.isInteger(b)).toBe(true)
        expect(b).toBeGreaterThanOrEqual(0)
      }
    }
  })

  it('binary mode marks exactly the occupied positions', () => {
    const rng = makeRng(0xbead)
    for (let round = 0; round < 100; round++) {
      const height = 1 + Math.floor(rng() * 6)
      const width = 1 + Math.floor(rng() * 6)
      const channels = 1 + Math.floor(rng() * 16)
      const values = Array.from({ length: height * width * channels }, () => (rng() - 0.4) * 2)
      const g = grid(height, width, channels, values)
      const counts = convArgmaxHistogram(g)
      const binary = convArgmaxHistogram(g, true)
      for (let p = 0; p < counts.length; p++) {
        expect(binary[p]).toBe(counts[p] > 0 ? 1 : 0)
      }
    }
  })

  it('yields the classic 169-dim feature for a 13x13 layer', () => {
    const rng = makeRng(13)
    const channels = 64
    const values = Array.from({ length: 13 * 13 * channels }, () => rng())
    const bins = convArgmaxHistogram(grid(13, 13, channels, values))
    expect(bins.length).toBe(169)
    expect(bins.reduce((a, b) => a + b, 0)).toBe(channels)
  })
})
