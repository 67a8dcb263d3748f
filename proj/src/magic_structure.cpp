#include "hardyforge/magic_structure.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "hardyforge/parallel.hpp"
#include "hardyforge/product_optimizer.hpp"

namespace hardyforge {

namespace {

Eigen::MatrixXcd orth_projector(const CVec& p) {
  const auto d = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) proj(r, c) -= p[r] * std::conj(p[c]);
  return proj;
}

CVec project_out(CVec v, const CVec& p) {
  const cplx along = vdot(p, v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= along * p[i];
  return v;
}

// Replaces each party axis by its components along (e0_k, e1_k).
CVec project_to_frame(const PureState& state, const std::vector<CVec>& e0,
                      const std::vector<CVec>& e1) {
  const int n = state.parties();
  std::vector<int> dims = state.dims();
  CVec t = state.amp_vector();
  for (int k = 0; k < n; ++k) {
    std::size_t outer = 1, inner = 1;
    for (int j = 0; j < k; ++j) outer *= static_cast<std::size_t>(dims[j]);
    for (int j = k + 1; j < n; ++j) inner *= static_cast<std::size_t>(dims[j]);
    const auto d = static_cast<std::size_t>(dims[k]);
    CVec out(outer * 2 * inner, cplx{0.0, 0.0});
    for (std::size_t o = 0; o < outer; ++o)
      for (int b = 0; b < 2; ++b) {
        const CVec& bra = b == 0 ? e0[k] : e1[k];
        cplx* dst = out.data() + (o * 2 + static_cast<std::size_t>(b)) * inner;
        for (std::size_t a = 0; a < d; ++a) {
          const cplx w = std::conj(bra[a]);
          const cplx* src = t.data() + (o * d + a) * inner;
          for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
        }
      }
    t = std::move(out);
    dims[k] = 2;
  }
  return t;
}

void fill_coefficients(MagicFrame& frame) {
  const int n = frame.parties();
  frame.projected = project_to_frame(frame.source, frame.e0, frame.e1);
  frame.h.assign(std::size_t{1} << n, cplx{0.0, 0.0});
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
    frame.h[mask] = std::conj(frame.projected[frame_index(SubsetMask(mask), n)]);
}

void select_magic_subset(MagicFrame& frame) {
  if (frame.collection.empty())
    throw Error(ErrorCode::not_entangled, "collection C is empty: the state is a product state");
  frame.m = -1;
  for (const auto& alpha : frame.collection) {
    if (alpha.size() > frame.m) {
      frame.m = alpha.size();
      frame.A = alpha;
    }
  }
}

CVec any_orthogonal(const CVec& p) {
  const Eigen::MatrixXcd proj = orth_projector(p);
  Eigen::Index best = 0;
  double best_norm = -1.0;
  for (Eigen::Index c = 0; c < proj.cols(); ++c) {
    const double nrm = proj.col(c).norm();
    if (nrm > best_norm + 1e-12) {
      best_norm = nrm;
      best = c;
    }
  }
  const Eigen::VectorXcd col = proj.col(best);
  return normalized(CVec(col.data(), col.data() + col.size()));
}

}  // namespace

std::size_t frame_index(SubsetMask alpha, int n) {
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    if (!alpha.contains(k)) idx |= std::size_t{1} << (n - 1 - k);
  return idx;
}

PureState MagicFrame::projected_state() const {
  return PureState(std::vector<int>(static_cast<std::size_t>(parties()), 2), projected);
}

ResidualTensor residual_tensor(const PureState& state, const ProductVector& pv, SubsetMask alpha) {
  const int n = state.parties();
  if (alpha == SubsetMask::full(n))
    throw Error(ErrorCode::invalid_argument, "residual tensors are defined for proper subsets only");
  if (pv.parties() != n)
    throw Error(ErrorCode::dimension_mismatch, "product vector has wrong party count");

  ResidualTensor rt;
  rt.alpha = alpha;
  std::vector<int> dims = state.dims();
  CVec t = state.amp_vector();
  // Contract members of alpha from the back so axis positions stay valid.
  for (int k = n - 1; k >= 0; --k) {
    if (!alpha.contains(k)) continue;
    t = contract_bra(t, dims, k, pv[k]);
    dims.erase(dims.begin() + k);
  }
  int axis = 0;
  for (int k = 0; k < n; ++k) {
    if (alpha.contains(k)) continue;
    t = apply_local(t, dims, axis, orth_projector(pv[k]));
    ++axis;
  }
  rt.dims = std::move(dims);
  rt.norm = vec_norm(t);
  rt.tensor = std::move(t);
  return rt;
}

std::vector<SubsetMask> collection(const PureState& state, const ProductVector& pv, double eps_c) {
  const int n = state.parties();
  const std::uint32_t count = (1u << n) - 1u;  // excludes I itself
  std::vector<char> member(count, 0);
  parallel_for(count, [&](std::size_t mask) {
    member[mask] = residual_tensor(state, pv, SubsetMask(static_cast<std::uint32_t>(mask))).norm > eps_c;
  });
  std::vector<SubsetMask> out;
  for (std::uint32_t mask = 0; mask < count; ++mask)
    if (member[mask]) out.emplace_back(mask);
  return out;
}

MagicFrame magic_frame(const PureState& state, const ProductVector& pv, const FrameConfig& config) {
  const int n = state.parties();
  MagicFrame frame{state, {}, {}, {}, 0, {}, {}, {}, config.eps_c};
  for (int k = 0; k < n; ++k) frame.e0.push_back(fix_phase(normalized(pv[k])));
  // Gauge: the first party's phase makes h_I real positive.
  const cplx hI = inner_product(state, ProductVector{frame.e0});
  if (std::abs(hI) > 0.0)
    for (auto& c : frame.e0[0]) c *= std::conj(hI) / std::abs(hI);
  const ProductVector p0{frame.e0};

  frame.collection = collection(state, p0, config.eps_c);
  select_magic_subset(frame);
  if (frame.m > n - 2)
    throw Error(ErrorCode::construction_failed,
                "product vector is not stationary: C contains a set of size n-1");

  frame.e1.resize(static_cast<std::size_t>(n));

  // Parties outside A: best rank-one approximation of G_A.
  const ResidualTensor ga = residual_tensor(state, p0, frame.A);
  if (ga.norm <= config.eps_c)
    throw Error(ErrorCode::construction_failed, "residual tensor G_A is degenerate");
  const std::vector<int> outside = frame.A.complement(n).members(n);
  {
    CVec scaled = ga.tensor;
    for (auto& c : scaled) c /= ga.norm;
    const PureState g(ga.dims, std::move(scaled));
    OptimizerConfig oc;
    oc.restarts = config.als_restarts;
    oc.seed = config.seed;
    const ClosestProductResult best = closest_product(g, oc);
    for (std::size_t i = 0; i < outside.size(); ++i) {
      const int k = outside[i];
      CVec v = project_out(best.pv[static_cast<int>(i)], frame.e0[k]);
      frame.e1[k] = vec_norm(v) > 1e-12 ? fix_phase(normalized(std::move(v))) : any_orthogonal(frame.e0[k]);
    }
  }

  // Parties in A: dominant direction of the reduced state orthogonal to p_k.
  for (int k : frame.A.members(n)) {
    const Eigen::MatrixXcd proj = orth_projector(frame.e0[k]);
    const Eigen::MatrixXcd sub = proj * reduced_density(state, k) * proj;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    if (es.eigenvalues()(top) > 1e-14) {
      const Eigen::VectorXcd v = es.eigenvectors().col(top);
      CVec e1 = project_out(CVec(v.data(), v.data() + v.size()), frame.e0[k]);
      frame.e1[k] = fix_phase(normalized(std::move(e1)));
    } else {
      frame.e1[k] = fix_phase(any_orthogonal(frame.e0[k]));
    }
  }

  fill_coefficients(frame);
  return frame;
}

MagicFrame frame_from_bases(const PureState& state, std::vector<CVec> e0, std::vector<CVec> e1,
                            double eps_c) {
  const int n = state.parties();
  if (static_cast<int>(e0.size()) != n || static_cast<int>(e1.size()) != n)
    throw Error(ErrorCode::dimension_mismatch, "one frame per party required");
  for (int k = 0; k < n; ++k)
    if (e0[k].size() != static_cast<std::size_t>(state.dim(k)) ||
        e1[k].size() != static_cast<std::size_t>(state.dim(k)))
      throw Error(ErrorCode::dimension_mismatch, "frame vector has wrong length");
  MagicFrame frame{state, std::move(e0), std::move(e1), {}, 0, {}, {}, {}, eps_c};
  frame.collection = collection(state, ProductVector{frame.e0}, eps_c);
  select_magic_subset(frame);
  fill_coefficients(frame);
  return frame;
}

std::vector<std::string> validate_magic_frame(const MagicFrame& frame, double tol, std::uint64_t seed) {
  std::vector<std::string> issues;
  const int n = frame.parties();
  const SubsetMask all = SubsetMask::full(n);
  auto mask_str = [n](SubsetMask s) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int k : s.members(n)) {
      os << (first ? "" : ",") << k + 1;
      first = false;
    }
    os << '}';
    return os.str();
  };

  for (int k = 0; k < n; ++k) {
    if (std::abs(vec_norm(frame.e0[k]) - 1.0) > tol || std::abs(vec_norm(frame.e1[k]) - 1.0) > tol ||
        std::abs(vdot(frame.e0[k], frame.e1[k])) > tol)
      issues.push_back("frame of party " + std::to_string(k + 1) + " is not orthonormal");
  }
  if (!(std::abs(frame.h_I()) > tol)) issues.push_back("h_I = 0");
  for (int k = 0; k < n; ++k)
    if (std::abs(frame.h_at(all.without(k))) > tol)
      issues.push_back("h_{k̄} ≠ 0 for k = " + std::to_string(k + 1));
  if (frame.m < 0 || frame.m > n - 2) issues.push_back("m = " + std::to_string(frame.m) + " outside [0, n-2]");
  if (frame.A.size() != frame.m) issues.push_back("|A| differs from m");
  if (std::find(frame.collection.begin(), frame.collection.end(), frame.A) == frame.collection.end())
    issues.push_back("A is not in C");
  if (!(std::abs(frame.h_A()) > tol)) issues.push_back("h_A = 0 for A = " + mask_str(frame.A));
  for (std::uint32_t mask = 0; mask < all.bits; ++mask) {
    const SubsetMask b(mask);
    if (b.size() > frame.m && b.size() < n - 1 && std::abs(frame.h_at(b)) > tol)
      issues.push_back("h_B ≠ 0 for B = " + mask_str(b) + " with m < |B| < n");
  }
  if (frame.source.all_qubits() && std::abs(vec_norm(frame.projected) - frame.source.norm()) > tol)
    issues.push_back("projected qubit state lost weight: frame is not a local basis change");

  // Item ii for qudits: <psi|p_B phi_rest> = 0 for random phi_k orthogonal to p_k.
  if (!frame.source.all_qubits()) {
    std::mt19937_64 rng(splitmix64(seed + 17));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::uint32_t mask = 0; mask < all.bits; ++mask) {
      const SubsetMask b(mask);
      if (b.size() <= frame.m) continue;
      for (int trial = 0; trial < 3; ++trial) {
        ProductVector probe;
        for (int k = 0; k < n; ++k) {
          if (b.contains(k)) {
            probe.factors.push_back(frame.e0[k]);
            continue;
          }
          CVec phi(frame.e0[k].size());
          for (auto& c : phi) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            c = cplx{re, im};
          }
          phi = project_out(std::move(phi), frame.e0[k]);
          probe.factors.push_back(normalized(std::move(phi)));
        }
        if (std::abs(inner_product(frame.source, probe)) > tol) {
          issues.push_back("item ii violated for B = " + mask_str(b));
          break;
        }
      }
    }
  }
  return issues;
}

}  // namespace hardyforge
