/**
 * HMPF1 feature files: the binary exchange format the matching engine reads.
 *
 * Layout, little-endian throughout:
 *
 *     bytes 0-3   magic "HMPF"
 *     bytes 4-7   format version, u32 (currently 1)
 *     bytes 8-11  vector count, u32
 *     bytes 12-15 vector dimension, u32
 *     then        count * dim IEEE-754 float32 values, row-major
 *
 * One row per image, in manifest order.  The engine rejects non-finite
 * values, truncated payloads, and trailing bytes, so this writer does too.
 */
import { readFileSync, writeFileSync } from 'fs'
import { ExporterError } from './errors.js'

export const MAGIC = 'HMPF'
export const VERSION = 1
const HEADER_BYTES = 16

export interface FeatureMatrix {
  count: number
  dim: number
  /** Row-major float32 payload, length count * dim. */
  values: Float32Array
}

/** Serialize feature rows into an HMPF1 buffer. */
export function encodeFeatureFile(rows: readonly Float32Array[]): Buffer {
  if (rows.length === 0) {
    throw new ExporterError('refusing to encode an empty feature file')
  }
  const dim = rows[0].length
  if (dim === 0) {
    throw new ExporterError('refusing to encode zero-dimensional vectors')
  }
  const buf = Buffer.alloc(HEADER_BYTES + rows.length * dim * 4)
  buf.write(MAGIC, 0, 'ascii')
  buf.writeUInt32LE(VERSION, 4)
  buf.writeUInt32LE(rows.length, 8)
  buf.writeUInt32LE(dim, 12)
  let offset = HEADER_BYTES
  for (let r = 0; r < rows.length; r++) {
    const row = rows[r]
    if (row.length !== dim) {
      throw new ExporterError(
        `feature dimension drifted mid-export: row ${r} has ${row.length} ` +
          `values, expected ${dim}`,
      )
    }
    for (let i = 0; i < dim; i++) {
      if (!Number.isFinite(row[i])) {
        throw new ExporterError(
          `refusing to write non-finite feature value at row ${r}, index ${i}`,
        )
      }
      buf.writeFloatLE(row[i], offset)
      offset += 4
    }
  }
  return buf
}

export function writeFeatureFile(path: string, rows: readonly Float32Array[]): void {
  writeFileSync(path, encodeFeatureFile(rows))
}

/** Parse and validate an HMPF1 buffer. */
export function decodeFeatureFile(buf: Buffer, label = 'buffer'): FeatureMatrix {
  if (buf.length < HEADER_BYTES) {
    throw new ExporterError(`${label}: shorter than the fixed 16-byte header`)
  }
  const magic = buf.toString('ascii', 0, 4)
  if (magic !== MAGIC) {
    throw new ExporterError(`${label}: bad magic ${JSON.stringify(magic)}`)
  }
  const version = buf.readUInt32LE(4)
  if (version !== VERSION) {
    throw new ExporterError(`${label}: unsupported version ${version}`)
  }
  const count = buf.readUInt32LE(8)
  const dim = buf.readUInt32LE(12)
  if (count === 0 || dim === 0) {
    throw new ExporterError(`${label}: zero count or dimension in header`)
  }
  const expected = count * dim * 4
  const payload = buf.length - HEADER_BYTES
  if (payload < expected) {
    throw new ExporterError(
      `${label}: truncated payload, have ${payload} bytes, need ${expected}`,
    )
  }
  if (payload > expected) {
    throw new ExporterError(`${label}: ${payload - expected} trailing bytes`)
  }
  const values = new Float32Array(count * dim)
  for (let i = 0; i < values.length; i++) {
    const v = buf.readFloatLE(HEADER_BYTES + i * 4)
    if (!Number.isFinite(v)) {
      throw new ExporterError(`${label}: payload contains non-finite values`)
    }
    values[i] = v
  }
  return { count, dim, values }
}

export function readFeatureFile(path: string): FeatureMatrix {
  return decodeFeatureFile(readFileSync(path), path)
}
