#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/sampler.hpp"

namespace bifbm {

/// Binary path block, all fields little-endian:
///
///   offset  size     field
///        0     4     magic "BFBM"
///        4     4     u32 format version (1)
///        8     8     u64 n (rows)
///       16     8     u64 d (components)
///       24     4     u32 method (0 cholesky, 1 lamperti, 2 spectral)
///       28     8     u64 seed
///       36     8n(d+1)  payload: row-major f64, each row t, B_1(t), ..., B_d(t)
inline constexpr std::uint32_t kPathFormatVersion = 1;

/// Contents of a serialized path.
struct PathRecord {
    std::vector<double> times;
    Eigen::MatrixXd values;  ///< n x d
    Method method = Method::cholesky;
    std::uint64_t seed = 0;
};

/// CSV with header "t,component_1,...,component_d" and 17 significant digits.
void write_path_csv(std::ostream& out, const SamplePath& path);
PathRecord read_path_csv(std::istream& in);

void write_path_binary(std::ostream& out, const SamplePath& path);
/// Throws DomainError on a bad magic, unknown version or truncated payload.
PathRecord read_path_binary(std::istream& in);

}  // namespace bifbm
