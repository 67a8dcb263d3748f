#include "hardyforge/statekit.hpp"

#include <random>
#include <string>

namespace hardyforge {

std::size_t total_size(std::span<const int> dims) {
  std::size_t s = 1;
  for (int d : dims) s *= static_cast<std::size_t>(d);
  return s;
}

PureState::PureState(std::vector<int> dims, CVec amps)
    : dims_(std::move(dims)), amps_(std::move(amps)) {
  if (dims_.size() < 2)
    throw Error(ErrorCode::invalid_argument, "a state needs at least two parties");
  if (dims_.size() > 30)
    throw Error(ErrorCode::out_of_range, "too many parties");
  for (int d : dims_)
    if (d < 2)
      throw Error(ErrorCode::invalid_argument,
                  "local dimension must be >= 2, got " + std::to_string(d));
  if (amps_.size() != total_size(dims_))
    throw Error(ErrorCode::dimension_mismatch,
                "amplitude count " + std::to_string(amps_.size()) +
                    " does not match product of dims " +
                    std::to_string(total_size(dims_)));
}

std::size_t PureState::stride(int k) const {
  std::size_t s = 1;
  for (int j = parties() - 1; j > k; --j) s *= static_cast<std::size_t>(dims_[j]);
  return s;
}

double PureState::norm() const { return vec_norm(amps_); }

bool PureState::all_qubits() const {
  for (int d : dims_)
    if (d != 2) return false;
  return true;
}

PureState PureState::normalized() const {
  return PureState(dims_, hardyforge::normalized(amps_));
}

ProductVector make_product(const std::vector<CVec>& factors) {
  return ProductVector{factors};
}

CVec basis_vector(int d, int i) {
  CVec v(static_cast<std::size_t>(d), cplx{0.0, 0.0});
  v.at(static_cast<std::size_t>(i)) = 1.0;
  return v;
}

namespace {

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t dim = 1;
  std::size_t inner = 1;
};

AxisSplit split_axis(std::span<const int> dims, int party) {
  AxisSplit s;
  for (int j = 0; j < static_cast<int>(dims.size()); ++j) {
    if (j < party)
      s.outer *= static_cast<std::size_t>(dims[j]);
    else if (j > party)
      s.inner *= static_cast<std::size_t>(dims[j]);
  }
  s.dim = static_cast<std::size_t>(dims[party]);
  return s;
}

void check_factor(const ProductVector& pv, const PureState& state, int k) {
  if (pv[k].size() != static_cast<std::size_t>(state.dim(k)))
    throw Error(ErrorCode::dimension_mismatch,
                "factor for party " + std::to_string(k + 1) + " has length " +
                    std::to_string(pv[k].size()) + ", expected " +
                    std::to_string(state.dim(k)));
}

}  // namespace

CVec contract_bra(std::span<const cplx> tensor, std::span<const int> dims, int party,
                  std::span<const cplx> bra) {
  const AxisSplit ax = split_axis(dims, party);
  if (bra.size() != ax.dim)
    throw Error(ErrorCode::dimension_mismatch, "bra length does not match axis");
  CVec out(ax.outer * ax.inner, cplx{0.0, 0.0});
  for (std::size_t o = 0; o < ax.outer; ++o)
    for (std::size_t a = 0; a < ax.dim; ++a) {
      const cplx w = std::conj(bra[a]);
      if (w == cplx{0.0, 0.0}) continue;
      const cplx* src = tensor.data() + (o * ax.dim + a) * ax.inner;
      cplx* dst = out.data() + o * ax.inner;
      for (std::size_t i = 0; i < ax.inner; ++i) dst[i] += w * src[i];
    }
  return out;
}

CVec apply_local(std::span<const cplx> tensor, std::span<const int> dims, int party,
                 const Eigen::MatrixXcd& op) {
  const AxisSplit ax = split_axis(dims, party);
  if (static_cast<std::size_t>(op.rows()) != ax.dim ||
      static_cast<std::size_t>(op.cols()) != ax.dim)
    throw Error(ErrorCode::dimension_mismatch, "operator shape does not match axis");
  CVec out(tensor.size(), cplx{0.0, 0.0});
  for (std::size_t o = 0; o < ax.outer; ++o)
    for (std::size_t r = 0; r < ax.dim; ++r) {
      cplx* dst = out.data() + (o * ax.dim + r) * ax.inner;
      for (std::size_t c = 0; c < ax.dim; ++c) {
        const cplx w = op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (w == cplx{0.0, 0.0}) continue;
        const cplx* src = tensor.data() + (o * ax.dim + c) * ax.inner;
        for (std::size_t i = 0; i < ax.inner; ++i) dst[i] += w * src[i];
      }
    }
  return out;
}

cplx inner_product(const PureState& state, const ProductVector& pv) {
  if (pv.parties() != state.parties())
    throw Error(ErrorCode::dimension_mismatch, "product vector has wrong party count");
  for (int k = 0; k < state.parties(); ++k) check_factor(pv, state, k);

  std::vector<int> dims = state.dims();
  CVec t = state.amp_vector();
  for (int k = state.parties() - 1; k >= 0; --k) {
    t = contract_bra(t, dims, k, pv[k]);
    dims.pop_back();
  }
  return std::conj(t[0]);
}

CVec conditional_vector(const PureState& state, const ProductVector& fixed, int k) {
  const int n = state.parties();
  if (k < 0 || k >= n)
    throw Error(ErrorCode::invalid_argument, "party index out of range");
  if (fixed.parties() != n)
    throw Error(ErrorCode::invalid_argument,
                "fixed vectors must be given for every party but the free one");
  for (int j = 0; j < n; ++j)
    if (j != k) check_factor(fixed, state, j);

  std::vector<int> dims = state.dims();
  CVec t = state.amp_vector();
  for (int j = n - 1; j > k; --j) {
    t = contract_bra(t, dims, j, fixed[j]);
    dims.pop_back();
  }
  for (int j = 0; j < k; ++j) {
    t = contract_bra(t, dims, 0, fixed[j]);
    dims.erase(dims.begin());
  }
  return t;
}

cplx expect_local_product(const PureState& state, std::span<const Eigen::MatrixXcd> ops) {
  if (static_cast<int>(ops.size()) != state.parties())
    throw Error(ErrorCode::dimension_mismatch, "one operator per party required");
  CVec t = state.amp_vector();
  for (int k = 0; k < state.parties(); ++k) t = apply_local(t, state.dims(), k, ops[k]);
  return vdot(state.amp_vector(), t);
}

Eigen::MatrixXcd reduced_density(const PureState& state, int k) {
  const AxisSplit ax = split_axis(state.dims(), k);
  const auto d = static_cast<Eigen::Index>(ax.dim);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  const auto amps = state.amps();
  for (std::size_t o = 0; o < ax.outer; ++o)
    for (std::size_t i = 0; i < ax.inner; ++i)
      for (std::size_t r = 0; r < ax.dim; ++r) {
        const cplx ar = amps[(o * ax.dim + r) * ax.inner + i];
        for (std::size_t c = 0; c < ax.dim; ++c)
          rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
              ar * std::conj(amps[(o * ax.dim + c) * ax.inner + i]);
      }
  return rho;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

PureState haar_random_state(const std::vector<int>& dims, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec amps(total_size(dims));
  for (auto& a : amps) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    a = cplx{re, im};
  }
  return PureState(dims, std::move(amps)).normalized();
}

Eigen::MatrixXcd haar_unitary(int d, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0x5bd1e995ULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(r, c) = cplx{re, im};
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    const cplx diag = r(c, c);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(c) *= diag / mag;
  }
  return q;
}

PureState apply_local_unitaries(const PureState& state,
                                std::span<const Eigen::MatrixXcd> unitaries) {
  if (static_cast<int>(unitaries.size()) != state.parties())
    throw Error(ErrorCode::dimension_mismatch, "one unitary per party required");
  CVec t = state.amp_vector();
  for (int k = 0; k < state.parties(); ++k) t = apply_local(t, state.dims(), k, unitaries[k]);
  return PureState(state.dims(), std::move(t));
}

PureState permute_parties(const PureState& state, std::span<const int> perm) {
  const int n = state.parties();
  if (static_cast<int>(perm.size()) != n)
    throw Error(ErrorCode::invalid_argument, "permutation has wrong length");
  std::vector<int> new_dims(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) new_dims[j] = state.dim(perm[j]);
  PureState tmp(new_dims, CVec(state.size()));
  CVec out(state.size());
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t flat = 0; flat < state.size(); ++flat) {
    // idx holds the old multi-index for `flat`.
    std::size_t rem = flat;
    for (int k = n - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % static_cast<std::size_t>(state.dim(k)));
      rem /= static_cast<std::size_t>(state.dim(k));
    }
    std::size_t target = 0;
    for (int j = 0; j < n; ++j) target += static_cast<std::size_t>(idx[perm[j]]) * tmp.stride(j);
    out[target] = state[flat];
  }
  return PureState(new_dims, std::move(out));
}

}  // namespace hardyforge
