#pragma once

#include <ostream>

namespace rgas {

/// Quick invariant suite (seconds): conservation, reversibility, sampler
/// sanity, schedule identities, stream determinism. Prints one line per
/// check; returns false on any failure.
bool run_selftest(std::ostream& out);

}  // namespace rgas
