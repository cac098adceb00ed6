"""The trusted proof kernel: limited prover and instruction interpreter."""
