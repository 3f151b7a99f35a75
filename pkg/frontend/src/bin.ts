#!/usr/bin/env node
import { main } from './cli.js'

main(process.argv.slice(2))
  .then((code) => {
    process.exitCode = code
  })
  .catch((err) => {
    const message = err instanceof Error ? err.message : String(err)
    console.error(`error: ${message}`)
    process.exitCode = 1
  })
