#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardyforge {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr const char* kToolVersion = "0.3.1";

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch,
  parse_error,
  not_entangled,
  construction_failed,
  out_of_range,
  non_orthonormal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Subset of parties. Bit k set <=> party k (0-based) belongs to the subset.
struct SubsetMask {
  std::uint32_t bits = 0;

  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(std::uint32_t b) : bits(b) {}

  static constexpr SubsetMask full(int n) {
    return SubsetMask(n >= 32 ? ~0u : ((1u << n) - 1u));
  }
  static constexpr SubsetMask single(int k) { return SubsetMask(1u << k); }

  constexpr bool contains(int k) const { return (bits >> k) & 1u; }
  constexpr int size() const { return std::popcount(bits); }
  constexpr bool empty() const { return bits == 0; }
  constexpr SubsetMask complement(int n) const {
    return SubsetMask(full(n).bits & ~bits);
  }
  constexpr SubsetMask with(int k) const { return SubsetMask(bits | (1u << k)); }
  constexpr SubsetMask without(int k) const {
    return SubsetMask(bits & ~(1u << k));
  }
  constexpr bool subset_of(SubsetMask o) const { return (bits & ~o.bits) == 0; }

  std::vector<int> members(int n) const {
    std::vector<int> out;
    for (int k = 0; k < n; ++k)
      if (contains(k)) out.push_back(k);
    return out;
  }

  friend constexpr auto operator<=>(SubsetMask, SubsetMask) = default;
};

inline double norm2(const CVec& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

inline double vec_norm(const CVec& v) { return std::sqrt(norm2(v)); }

// <u|v>
inline cplx vdot(const CVec& u, const CVec& v) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

inline CVec normalized(CVec v) {
  const double nrm = vec_norm(v);
  if (!(nrm > 0.0))
    throw Error(ErrorCode::invalid_argument, "cannot normalize a zero vector");
  for (auto& c : v) c /= nrm;
  return v;
}

}  // namespace hardyforge
