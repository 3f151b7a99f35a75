/**
 * Reads the engine's dataset manifest just far enough to enumerate images.
 *
 * A manifest describes its reference and query splits with exactly one
 * source each:
 *
 *     reference_dir  = "winter"      images in a directory, sorted by name
 *     reference_list = "refs.txt"    one path per line, '#' comments allowed
 *     reference_count = 1000         no image files at all (placeholders)
 *
 * Count-only splits exist for precomputed-feature pipelines; the exporter
 * needs pixels, so it rejects them with a clear message.  Ground-truth
 * settings are the engine's business and are ignored here.
 */
import { existsSync, readdirSync, readFileSync, statSync } from 'fs'
import { dirname, extname, resolve } from 'path'
import { parse as parseToml } from 'smol-toml'
import { ExporterError } from './errors.js'

const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg'])

export type Split = 'reference' | 'query'

/** Absolute image paths for one split, in engine order. */
export function imagesForSplit(manifestPath: string, split: Split): string[] {
  let doc: Record<string, unknown>
  try {
    doc = parseToml(readFileSync(manifestPath, 'utf-8'))
  } catch (err) {
    if (err instanceof ExporterError) throw err
    const detail = err instanceof Error ? err.message : String(err)
    throw new ExporterError(`${manifestPath}: not valid TOML: ${detail}`)
  }
  const baseDir = dirname(resolve(manifestPath))
  const dir = doc[`${split}_dir`]
  const list = doc[`${split}_list`]
  const count = doc[`${split}_count`]
  const given = [dir, list, count].filter((v) => v !== undefined).length
  if (given !== 1) {
    throw new ExporterError(
      `manifest must set exactly one of ${split}_dir, ${split}_list, ` +
        `${split}_count (got ${given})`,
    )
  }
  if (count !== undefined) {
    throw new ExporterError(
      `the ${split} split lists an image count only; the exporter needs ` +
        'actual image files',
    )
  }
  if (dir !== undefined) {
    return imagesInDirectory(resolve(baseDir, expectString(dir, `${split}_dir`)))
  }
  return imagesFromListFile(resolve(baseDir, expectString(list, `${split}_list`)))
}

function expectString(value: unknown, key: string): string {
  if (typeof value !== 'string') {
    throw new ExporterError(`manifest key ${key} must be a string`)
  }
  return value
}

function imagesInDirectory(dir: string): string[] {
  if (!existsSync(dir) || !statSync(dir).isDirectory()) {
    throw new ExporterError(`image directory not found: ${dir}`)
  }
  // Plain code-unit sort matches the engine's byte-order listing for the
  // ASCII file names both sides require; locale-aware sorting would not.
  const names = readdirSync(dir)
    .filter((name) => IMAGE_EXTENSIONS.has(extname(name).toLowerCase()))
    .sort()
  if (names.length === 0) {
    throw new ExporterError(`no images found in ${dir}`)
  }
  return names.map((name) => resolve(dir, name))
}

function imagesFromListFile(listPath: string): string[] {
  if (!existsSync(listPath)) {
    throw new ExporterError(`image list file not found: ${listPath}`)
  }
  const baseDir = dirname(listPath)
  const paths: string[] = []
  for (const rawLine of readFileSync(listPath, 'utf-8').split('\n')) {
    const line = rawLine.trim()
    if (line === '' || line.startsWith('#')) continue
    const path = resolve(baseDir, line)
    if (!existsSync(path)) {
      throw new ExporterError(`listed image not found: ${path}`)
    }
    paths.push(path)
  }
  if (paths.length === 0) {
    throw new ExporterError(`image list file is empty: ${listPath}`)
  }
  return paths
}
