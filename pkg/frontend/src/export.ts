/** Export jobs: manifest-ordered images through a model into an HMPF1 file. */
import { writeFeatureFile } from './hmpf.js'
import { imageToInputTensor } from './image.js'
import { convArgmaxHistogram } from './histogram.js'
import { DEFAULT_MODEL_ID, MODEL_INPUT_SIZE, loadModel } from './model.js'
import { ExporterError } from './errors.js'

export type Aggregation = 'raw-embedding' | 'conv-argmax-histogram'

export interface ExportJob {
  /** Image paths in manifest order; order is preserved in the output rows. */
  images: string[]
  modelId?: string
  /** Layer whose output is exported; defaults per aggregation. */
  layer?: string
  aggregation: Aggregation
  /** Histogram variant: mark occupied positions 0/1 instead of counting. */
  binaryBins?: boolean
  outPath: string
}

export interface ExportSummary {
  count: number
  dim: number
  modelId: string
  layer: string
}

const DEFAULT_LAYER: Record<Aggregation, string> = {
  'raw-embedding': 'embed',
  'conv-argmax-histogram': 'conv3',
}

export async function runExportJob(job: ExportJob): Promise<ExportSummary> {
  if (job.images.length === 0) {
    throw new ExporterError('export job has no images')
  }
  const modelId = job.modelId ?? DEFAULT_MODEL_ID
  const layerName = job.layer ?? DEFAULT_LAYER[job.aggregation]
  const model = await loadModel(modelId)
  try {
    const layer = model.layer(layerName)
    if (job.aggregation === 'conv-argmax-histogram' && layer.kind !== 'spatial') {
      throw new ExporterError(
        `layer '${layer.name}' has no spatial extent; position histograms ` +
          'need a convolutional layer',
      )
    }
    if (job.aggregation === 'raw-embedding' && layer.kind !== 'vector') {
      throw new ExporterError(
        `layer '${layer.name}' is spatial; raw-embedding exports the ` +
          "model's embedding output (layer 'embed')",
      )
    }

    const rows: Float32Array[] = []
    for (const imagePath of job.images) {
      const input = imageToInputTensor(imagePath, MODEL_INPUT_SIZE)
      try {
        const activation = model.forwardTo(input, layer.name)
        if (job.aggregation === 'conv-argmax-histogram') {
          const [height, width, channels] = activation.shape
          rows.push(
            convArgmaxHistogram(
              { height, width, channels, values: activation.values },
              job.binaryBins ?? false,
            ),
          )
        } else {
          rows.push(activation.values)
        }
      } finally {
        input.dispose()
      }
    }
    writeFeatureFile(job.outPath, rows)
    return {
      count: rows.length,
      dim: rows[0].length,
      modelId,
      layer: layer.name,
    }
  } finally {
    model.dispose()
  }
}
