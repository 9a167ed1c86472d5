#include "pivchol/serialization.hpp"

#include "pivchol/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace pivchol {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'C', 'H', 'L'};
constexpr std::array<char, 4> kDiagTag{'R', 'D', 'I', 'A'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ContractViolation("container truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_tag(std::ostream& out, const std::array<char, 4>& tag) { out.write(tag.data(), 4); }

void expect_tag(std::istream& in, const std::array<char, 4>& tag) {
  std::array<char, 4> got{};
  if (!in.read(got.data(), 4) || got != tag) {
    throw ContractViolation("container: expected tag '" + std::string(tag.data(), 4) + "'");
  }
}

}  // namespace

void write_partial_cholesky(std::ostream& out, const PartialCholesky& pc) {
  const Index n = pc.size();
  put_tag(out, kMagic);
  put<std::uint32_t>(out, kContainerVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(n));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(pc.rank()));
  for (Index p : pc.pivots) put<std::uint64_t>(out, static_cast<std::uint64_t>(p));
  for (Index j = 0; j < n; ++j) put<double>(out, pc.schur_diag[j]);
  for (const auto& col : pc.cols) {
    for (Index j = 0; j < n; ++j) put<double>(out, col[j]);
  }
  if (!out) throw ContractViolation("container: write failed");
}

PartialCholesky read_partial_cholesky(std::istream& in) {
  expect_tag(in, kMagic);
  const auto version = get<std::uint32_t>(in);
  if (version != kContainerVersion) {
    throw ContractViolation("container: unsupported version " + std::to_string(version));
  }
  const auto n = static_cast<Index>(get<std::uint64_t>(in));
  const auto m = static_cast<Index>(get<std::uint64_t>(in));
  if (n < 0 || m < 0 || m > n) throw ContractViolation("container: invalid dimensions");

  PartialCholesky pc;
  pc.pivots.resize(static_cast<std::size_t>(n));
  for (auto& p : pc.pivots) {
    p = static_cast<Index>(get<std::uint64_t>(in));
    if (p < 0 || p >= n) throw ContractViolation("container: pivot out of range");
  }
  pc.schur_diag.resize(n);
  for (Index j = 0; j < n; ++j) pc.schur_diag[j] = get<double>(in);
  pc.cols.resize(static_cast<std::size_t>(m));
  for (auto& col : pc.cols) {
    col.resize(n);
    for (Index j = 0; j < n; ++j) col[j] = get<double>(in);
  }

  Eigen::VectorXd original = pc.schur_diag;
  for (const auto& col : pc.cols) original += col.cwiseAbs2();
  pc.scale = n > 0 ? original.maxCoeff() : 1.0;
  pc.trace_history.push_back(pc.residual_trace());
  return pc;
}

void write_preconditioner(std::ostream& out, const LowRankTriangular& pre) {
  write_partial_cholesky(out, pre.factor());
  put_tag(out, kDiagTag);
  for (Index j = 0; j < pre.size(); ++j) put<double>(out, pre.resid_diag()[j]);
  if (!out) throw ContractViolation("container: write failed");
}

LowRankTriangular read_preconditioner(std::istream& in) {
  auto pc = std::make_shared<PartialCholesky>(read_partial_cholesky(in));
  expect_tag(in, kDiagTag);
  Eigen::VectorXd diag(pc->size());
  for (Index j = 0; j < pc->size(); ++j) diag[j] = get<double>(in);
  return LowRankTriangular(std::move(pc), std::move(diag));
}

void save_partial_cholesky(const std::filesystem::path& path, const PartialCholesky& pc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractViolation("cannot open " + path.string() + " for writing");
  write_partial_cholesky(out, pc);
}

PartialCholesky load_partial_cholesky(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractViolation("cannot open " + path.string());
  return read_partial_cholesky(in);
}

}  // namespace pivchol
