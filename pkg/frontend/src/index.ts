export { ExporterError } from './errors.js'
export {
  MAGIC,
  VERSION,
  decodeFeatureFile,
  encodeFeatureFile,
  readFeatureFile,
  writeFeatureFile,
} from './hmpf.js'
export type { FeatureMatrix } from './hmpf.js'
export { imagesForSplit } from './manifest.js'
export type { Split } from './manifest.js'
export { decodeImage, imageToInputTensor } from './image.js'
export type { RgbImage } from './image.js'
export {
  CompactPlaceModel,
  DEFAULT_MODEL_ID,
  EMBED_DIM,
  MODEL_IDS,
  MODEL_INPUT_SIZE,
  loadModel,
} from './model.js'
export type { Activation, LayerInfo, LayerKind } from './model.js'
export { convArgmaxHistogram, positiveMaximumCount } from './histogram.js'
export type { ActivationGrid } from './histogram.js'
export { runExportJob } from './export.js'
export type { Aggregation, ExportJob, ExportSummary } from './export.js'
export { USAGE, main } from './cli.js'
