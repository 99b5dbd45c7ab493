#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "himc/trace.hpp"

namespace himc {

struct KernelSpec {
  std::string kernel;       ///< knn, conv, hist, rmse, bnn, mat_add, string, cmul
  std::uint64_t size = 1024;  ///< element count
  std::uint64_t seed = 1;
};

const std::vector<std::string>& kernel_names();
KernelCategory kernel_category(const std::string& kernel);

/// Deterministic trace generator: same (kernel, size, seed) always yields the
/// same events, data, and dependency edges. Integer arithmetic only.
Trace generate(const KernelSpec& spec);

/// Straightforward scalar implementation of the kernel over the same seeded
/// inputs; returns the golden output region (what the checksummed blocks must
/// hold after any placement runs the trace).
std::vector<std::uint32_t> reference_output(const KernelSpec& spec);

std::uint64_t reference_checksum(const KernelSpec& spec);

}  // namespace himc
