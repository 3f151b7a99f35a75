/** Any failure this package can diagnose: bad inputs, bad files, bad jobs. */
export class ExporterError extends Error {
  constructor(message: string) {
    super(message)
    this.name = 'ExporterError'
  }
}
