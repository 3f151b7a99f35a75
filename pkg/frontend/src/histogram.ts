/**
 * Position-histogram aggregation of convolutional activations.
 *
 * For every feature map whose maximum activation is strictly positive, the
 * spatial position of that maximum gets one count; maps that are zero or
 * negative everywhere contribute nothing.  The result is a height*width
 * vector (169 for a 13x13 layer) summarizing where the network fired
 * hardest, independent of which channel fired.
 *
 * Ties inside a map break toward the first position in row-major order so
 * the aggregation is deterministic.
 */
import { ExporterError } from './errors.js'

export interface ActivationGrid {
  height: number
  width: number
  channels: number
  /** Row-major [height, width, channels] activations. */
  values: ArrayLike<number>
}

export function convArgmaxHistogram(
  grid: ActivationGrid,
  binary = false,
): Float32Array {
  const { height, width, channels, values } = grid
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw new ExporterError(
      `activation grid must be non-empty, got ${height}x${width}x${channels}`,
    )
  }
  if (values.length !== height * width * channels) {
    throw new ExporterError(
      `activation grid has ${values.length} values, expected ` +
        `${height * width * channels}`,
    )
  }
  const bins = new Float32Array(height * width)
  for (let c = 0; c < channels; c++) {
    let best = 0 // strictly positive threshold: zero maxima never win
    let bestPosition = -1
    for (let i = 0; i < height; i++) {
      for (let j = 0; j < width; j++) {
        const v = values[(i * width + j) * channels + c]
        if (v > best) {
          best = v
          bestPosition = i * width + j
        }
      }
    }
    if (bestPosition >= 0) {
      bins[bestPosition] = binary ? 1 : bins[bestPosition] + 1
    }
  }
  return bins
}

/** Number of maps with a strictly positive maximum — the count-mode bin sum. */
export function positiveMaximumCount(grid: ActivationGrid): number {
  const { height, width, channels, values } = grid
  let count = 0
  for (let c = 0; c < channels; c++) {
    for (let p = 0; p < height * width; p++) {
      if (values[p * channels + c] > 0) {
        count++
        break
      }
    }
  }
  return count
}
