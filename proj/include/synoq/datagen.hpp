#pragma once

#include "synoq/schema.hpp"

namespace synoq {

// Synthetic banking-style dataset: six relations totalling about 10^4 rows
// at scale 1, with Zipf-distributed join-key frequencies, categorical
// columns matching the benchmark predicates, and referential integrity on
// every foreign key. Deterministic for a fixed (scale, seed).
Database gen_data(u64 scale, u64 seed);

}  // namespace synoq
