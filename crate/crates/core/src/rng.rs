// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for sample `stream` under `seed`.
///
/// Streams are independent ChaCha8 streams under one key, so sample `i`
/// is reproducible without generating samples `0..i` first and parallel
/// workers never share state.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
