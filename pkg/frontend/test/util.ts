/** Shared fixtures: a seeded PRNG and tiny PNG corpora in temp directories. */
import { mkdirSync, mkdtempSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'
import { PNG } from 'pngjs'

/** xorshift32 — deliberately a different generator than the model's PRNG. */
export function makeRng(seed: number): () => number {
  let state = seed >>> 0 || 1
  return () => {
    state ^= state << 13
    state ^= state >>> 17
    state ^= state << 5
    state >>>= 0
    return state / 4294967296
  }
}

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), `${prefix}-`))
}

/** Write a seeded-noise RGB PNG so repeated fixture builds are identical. */
export function writeNoisePng(path: string, size: number, seed: number): void {
  const rng = makeRng(seed)
  const png = new PNG({ width: size, height: size })
  for (let p = 0; p < size * size; p++) {
    png.data[p * 4] = Math.floor(rng() * 256)
    png.data[p * 4 + 1] = Math.floor(rng() * 256)
    png.data[p * 4 + 2] = Math.floor(rng() * 256)
    png.data[p * 4 + 3] = 255
  }
  writeFileSync(path, PNG.sync.write(png))
}

export interface Corpus {
  dir: string
  manifestPath: string
  imagePaths: string[]
}

/** A directory-sourced manifest with `n` reference PNGs and a count query split. */
export function buildCorpus(n: number, size = 16): Corpus {
  const dir = tempDir('exporter-corpus')
  const refsDir = join(dir, 'refs')
  mkdirSync(refsDir)
  const imagePaths: string[] = []
  for (let i = 0; i < n; i++) {
    const path = join(refsDir, `ref_${String(i).padStart(2, '0')}.png`)
    writeNoisePng(path, size, 1000 + i)
    imagePaths.push(path)
  }
  const manifestPath = join(dir, 'manifest.toml')
  writeFileSync(
    manifestPath,
    [
      'reference_dir = "refs"',
      `query_count = ${n}`,
      '',
      '[ground_truth]',
      'mode = "frame-offset"',
      'frame_tolerance = 1',
      '',
    ].join('\n'),
  )
  return { dir, manifestPath, imagePaths }
}
