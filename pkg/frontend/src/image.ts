/** Image decoding (8-bit PNG/JPEG) and resizing to a network's input size. */
import * as tf from '@tensorflow/tfjs'
import { readFileSync } from 'fs'
import { extname } from 'path'
import { decode as decodeJpegBuffer } from 'jpeg-js'
import { PNG } from 'pngjs'
import { ExporterError } from './errors.js'

export interface RgbImage {
  height: number
  width: number
  /** Interleaved RGB in [0, 1], row-major, length height * width * 3. */
  data: Float32Array
}

/** Decode a PNG or JPEG file into normalized RGB pixels. */
export function decodeImage(path: string): RgbImage {
  const ext = extname(path).toLowerCase()
  let rgba: { width: number; height: number; data: Uint8Array | Buffer }
  try {
    if (ext === '.png') {
      rgba = PNG.sync.read(readFileSync(path))
    } else if (ext === '.jpg' || ext === '.jpeg') {
      rgba = decodeJpegBuffer(readFileSync(path), { useTArray: true })
    } else {
      throw new ExporterError(`unsupported image extension ${ext || '(none)'}`)
    }
  } catch (err) {
    if (err instanceof ExporterError) throw err
    const detail = err instanceof Error ? err.message : String(err)
    throw new ExporterError(`cannot decode image ${path}: ${detail}`)
  }
  const { width, height } = rgba
  const data = new Float32Array(width * height * 3)
  for (let p = 0; p < width * height; p++) {
    data[p * 3] = rgba.data[p * 4] / 255
    data[p * 3 + 1] = rgba.data[p * 4 + 1] / 255
    data[p * 3 + 2] = rgba.data[p * 4 + 2] / 255
  }
  return { height, width, data }
}

/** Decode and bilinearly resize to a square [size, size, 3] input tensor. */
export function imageToInputTensor(path: string, size: number): tf.Tensor3D {
  const image = decodeImage(path)
  return tf.tidy(() => {
    const raw = tf.tensor3d(image.data, [image.height, image.width, 3])
    if (image.height === size && image.width === size) return raw
    return tf.image.resizeBilinear(raw, [size, size])
  })
}
