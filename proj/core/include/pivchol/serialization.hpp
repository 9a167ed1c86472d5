#pragma once

#include "pivchol/pivoted_cholesky.hpp"
#include "pivchol/preconditioner.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace pivchol {

// Binary container, little-endian throughout:
//
//   "PCHL"            4 bytes
//   version           u32 (currently 1)
//   N                 u64
//   M                 u64
//   pivots            N x u64
//   schur diagonal    N x f64
//   columns           M x (N x f64), column-major
//
// A preconditioner file appends the tag "RDIA" followed by N x f64 holding D~.
inline constexpr std::uint32_t kContainerVersion = 1;

void write_partial_cholesky(std::ostream& out, const PartialCholesky& pc);
// The kernel scale is not stored; it is recovered as the largest original
// diagonal entry d_j + sum_m L_jm^2. The trace history is not stored.
PartialCholesky read_partial_cholesky(std::istream& in);

void write_preconditioner(std::ostream& out, const LowRankTriangular& pre);
LowRankTriangular read_preconditioner(std::istream& in);

void save_partial_cholesky(const std::filesystem::path& path, const PartialCholesky& pc);
PartialCholesky load_partial_cholesky(const std::filesystem::path& path);

}  // namespace pivchol
