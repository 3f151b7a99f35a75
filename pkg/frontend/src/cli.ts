/**
 * Command-line interface.
 *
 *   hmpf-export --manifest data/manifest.toml --split reference \
 *               --aggregation conv-argmax-histogram --out hybrid_ref.hmpf
 *
 * Flags mirror the engine CLI's naming so the two tools read the same
 * manifests and hand feature files across without glue.
 */
import { parseArgs } from 'node:util'
import { runExportJob, type Aggregation } from './export.js'
import { imagesForSplit, type Split } from './manifest.js'
import { DEFAULT_MODEL_ID, MODEL_IDS } from './model.js'
import { ExporterError } from './errors.js'

const AGGREGATIONS = ['raw-embedding', 'conv-argmax-histogram'] as const
const SPLITS = ['reference', 'query'] as const

export const USAGE = `usage: hmpf-export --manifest FILE --aggregation KIND --out FILE [options]

required:
  --manifest FILE      dataset manifest (TOML)
  --aggregation KIND   ${AGGREGATIONS.join(' | ')}
  --out FILE           output feature file

options:
  --split NAME         image split to export: ${SPLITS.join(' | ')} (default reference)
  --model ID           deterministic embedding model: ${MODEL_IDS.join(' | ')}
  --layer NAME         layer to export (default: embed / conv3 per aggregation)
  --binary             histogram variant: 0/1 occupancy instead of counts
  -h, --help           show this message
`

function requireChoice<T extends string>(
  value: string,
  choices: readonly T[],
  flag: string,
): T {
  if (!(choices as readonly string[]).includes(value)) {
    throw new ExporterError(
      `${flag} must be one of ${choices.join(', ')}, got '${value}'`,
    )
  }
  return value as T
}

export async function main(argv: string[]): Promise<number> {
  let values
  try {
    values = parseArgs({
      args: argv,
      options: {
        manifest: { type: 'string' },
        split: { type: 'string', default: 'reference' },
        model: { type: 'string', default: DEFAULT_MODEL_ID },
        layer: { type: 'string' },
        aggregation: { type: 'string' },
        binary: { type: 'boolean', default: false },
        help: { type: 'boolean', short: 'h', default: false },
        out: { type: 'string' },
      },
      allowPositionals: false,
    }).values
  } catch (err) {
    const detail = err instanceof Error ? err.message : String(err)
    throw new ExporterError(`${detail}\n${USAGE}`)
  }
  if (values.help) {
    console.log(USAGE)
    return 0
  }
  for (const [flag, value] of [
    ['--manifest', values.manifest],
    ['--aggregation', values.aggregation],
    ['--out', values.out],
  ] as const) {
    if (value === undefined) {
      throw new ExporterError(`${flag} is required\n${USAGE}`)
    }
  }
  const split: Split = requireChoice(values.split!, SPLITS, '--split')
  const aggregation: Aggregation = requireChoice(
    values.aggregation!,
    AGGREGATIONS,
    '--aggregation',
  )

  const images = imagesForSplit(values.manifest!, split)
  const summary = await runExportJob({
    images,
    modelId: values.model,
    layer: values.layer,
    aggregation,
    binaryBins: values.binary,
    outPath: values.out!,
  })
  console.log(
    `wrote ${summary.count} x ${summary.dim} features ` +
      `(${aggregation}, ${summary.modelId}/${summary.layer}) to ${values.out}`,
  )
  return 0
}
