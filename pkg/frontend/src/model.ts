/**
 * A compact convolutional embedding network with deterministic weights.
 *
 * Weights are drawn from a PRNG seeded by the model identifier, so loading
 * the same identifier always yields bit-identical parameters — no weight
 * files, no downloads, and two runs of the same export job produce
 * byte-identical output.  The network is intentionally small; it exists to
 * exercise the export pipeline end to end, and its final convolution is
 * sized to a 13x13 spatial grid so position-histogram aggregation yields
 * the classic 169-dimensional feature.
 *
 * Architecture (input 104x104 RGB in [0, 1]):
 *
 *     conv1  5x5 /2 'same' + ReLU   -> 52x52x16
 *     pool1  max 2x2 /2             -> 26x26x16
 *     conv2  3x3 /1 'same' + ReLU   -> 26x26x32
 *     pool2  max 2x2 /2             -> 13x13x32
 *     conv3  3x3 /1 'same' + ReLU   -> 13x13x64
 *     embed  global avg pool + dense + L2 norm -> 128
 */
import * as tf from '@tensorflow/tfjs'
import { ExporterError } from './errors.js'

export const MODEL_INPUT_SIZE = 104
export const EMBED_DIM = 128
export const MODEL_IDS = ['compact-place-cnn-v1', 'compact-place-cnn-v2'] as const
export const DEFAULT_MODEL_ID = MODEL_IDS[0]

export type LayerKind = 'spatial' | 'vector'

export interface LayerInfo {
  name: string
  kind: LayerKind
  /** [height, width, channels] for spatial layers, [dim] for vector ones. */
  shape: number[]
}

export interface Activation {
  kind: LayerKind
  shape: number[]
  values: Float32Array
}

const LAYERS: LayerInfo[] = [
  { name: 'conv1', kind: 'spatial', shape: [52, 52, 16] },
  { name: 'pool1', kind: 'spatial', shape: [26, 26, 16] },
  { name: 'conv2', kind: 'spatial', shape: [26, 26, 32] },
  { name: 'pool2', kind: 'spatial', shape: [13, 13, 32] },
  { name: 'conv3', kind: 'spatial', shape: [13, 13, 64] },
  { name: 'embed', kind: 'vector', shape: [EMBED_DIM] },
]

function fnv1a(text: string): number {
  let hash = 0x811c9dc5
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i)
    hash = Math.imul(hash, 0x01000193)
  }
  return hash >>> 0
}

function mulberry32(seed: number): () => number {
  let state = seed >>> 0
  return () => {
    state = (state + 0x6d2b79f5) | 0
    let t = Math.imul(state ^ (state >>> 15), 1 | state)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

/** He-scaled gaussian weights via Box-Muller over the seeded stream. */
function gaussianWeights(rng: () => number, n: number, fanIn: number): Float32Array {
  const std = Math.sqrt(2 / fanIn)
  const out = new Float32Array(n)
  for (let i = 0; i < n; i += 2) {
    let u = 0
    while (u === 0) u = rng()
    const v = rng()
    const radius = Math.sqrt(-2 * Math.log(u))
    out[i] = radius * Math.cos(2 * Math.PI * v) * std
    if (i + 1 < n) out[i + 1] = radius * Math.sin(2 * Math.PI * v) * std
  }
  return out
}

export class CompactPlaceModel {
  readonly id: string
  private readonly conv1: tf.Tensor4D
  private readonly conv2: tf.Tensor4D
  private readonly conv3: tf.Tensor4D
  private readonly dense: tf.Tensor2D

  constructor(id: string) {
    this.id = id
    const rng = mulberry32(fnv1a(id))
    // Generation order is part of the weight contract: conv1, conv2, conv3,
    // dense, each kernel in tfjs [h, w, inC, outC] layout.
    this.conv1 = tf.tensor4d(gaussianWeights(rng, 5 * 5 * 3 * 16, 5 * 5 * 3), [5, 5, 3, 16])
    this.conv2 = tf.tensor4d(gaussianWeights(rng, 3 * 3 * 16 * 32, 3 * 3 * 16), [3, 3, 16, 32])
    this.conv3 = tf.tensor4d(gaussianWeights(rng, 3 * 3 * 32 * 64, 3 * 3 * 32), [3, 3, 32, 64])
    this.dense = tf.tensor2d(gaussianWeights(rng, 64 * EMBED_DIM, 64), [64, EMBED_DIM])
  }

  layers(): LayerInfo[] {
    return LAYERS.map((l) => ({ ...l, shape: [...l.shape] }))
  }

  layer(name: string): LayerInfo {
    const info = LAYERS.find((l) => l.name === name)
    if (!info) {
      const known = LAYERS.map((l) => l.name).join(', ')
      throw new ExporterError(`model has no layer '${name}' (layers: ${known})`)
    }
    return { ...info, shape: [...info.shape] }
  }

  /** Run the network up to the named layer on one [104, 104, 3] input. */
  forwardTo(input: tf.Tensor3D, layerName: string): Activation {
    const info = this.layer(layerName)
    const values = tf.tidy(() => {
      let x = input.expandDims(0) as tf.Tensor4D
      x = tf.relu(tf.conv2d(x, this.conv1, 2, 'same'))
      if (info.name === 'conv1') return x.dataSync()
      x = tf.maxPool(x, 2, 2, 'same')
      if (info.name === 'pool1') return x.dataSync()
      x = tf.relu(tf.conv2d(x, this.conv2, 1, 'same'))
      if (info.name === 'conv2') return x.dataSync()
      x = tf.maxPool(x, 2, 2, 'same')
      if (info.name === 'pool2') return x.dataSync()
      x = tf.relu(tf.conv2d(x, this.conv3, 1, 'same'))
      if (info.name === 'conv3') return x.dataSync()
      const pooled = tf.mean(x, [1, 2]) as tf.Tensor2D
      const projected = tf.matMul(pooled, this.dense)
      const norm = tf.norm(projected)
      const unit = tf.div(projected, tf.maximum(norm, 1e-12))
      return unit.dataSync()
    })
    return {
      kind: info.kind,
      shape: info.shape,
      values: Float32Array.from(values),
    }
  }

  dispose(): void {
    this.conv1.dispose()
    this.conv2.dispose()
    this.conv3.dispose()
    this.dense.dispose()
  }
}

/** Instantiate a registered model; runs on the deterministic CPU backend. */
export async function loadModel(id: string = DEFAULT_MODEL_ID): Promise<CompactPlaceModel> {
  if (!(MODEL_IDS as readonly string[]).includes(id)) {
    throw new ExporterError(
      `unknown model '${id}' (available: ${MODEL_IDS.join(', ')})`,
    )
  }
  await tf.setBackend('cpu')
  await tf.ready()
  return new CompactPlaceModel(id)
}
