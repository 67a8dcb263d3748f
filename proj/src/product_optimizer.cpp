#include "hardyforge/product_optimizer.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "hardyforge/magic_structure.hpp"
#include "hardyforge/parallel.hpp"

namespace hardyforge {

CVec fix_phase(CVec v) {
  double best = 0.0;
  for (const auto& c : v) best = std::max(best, std::abs(c));
  if (best == 0.0) return v;
  for (const auto& c : v) {
    if (std::abs(c) >= best * (1.0 - 1e-9)) {
      const cplx phase = std::conj(c) / std::abs(c);
      for (auto& x : v) x *= phase;
      break;
    }
  }
  return v;
}

namespace {

double sweep(const PureState& state, ProductVector& pv) {
  double overlap = 0.0;
  for (int k = 0; k < state.parties(); ++k) {
    CVec chi = conditional_vector(state, pv, k);
    const double nrm = vec_norm(chi);
    if (nrm == 0.0) continue;
    for (auto& c : chi) c /= nrm;
    pv[k] = std::move(chi);
    overlap = nrm;
  }
  return overlap;
}

ProductVector random_product(const std::vector<int>& dims, std::uint64_t seed, bool real) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  ProductVector pv;
  for (int d : dims) {
    CVec v(static_cast<std::size_t>(d));
    for (auto& c : v) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      c = cplx{re, real ? 0.0 : im};
    }
    pv.factors.push_back(normalized(std::move(v)));
  }
  return pv;
}

ProductVector dominant_product(const PureState& state) {
  ProductVector pv;
  for (int k = 0; k < state.parties(); ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reduced_density(state, k));
    const Eigen::VectorXcd top = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    pv.factors.emplace_back(top.data(), top.data() + top.size());
  }
  return pv;
}

}  // namespace

AlternatingRun alternating_maximization(const PureState& state, ProductVector init,
                                        int max_iters, double tol) {
  AlternatingRun run;
  for (auto& f : init.factors) f = normalized(std::move(f));
  run.pv = std::move(init);
  double overlap = std::abs(inner_product(state, run.pv));
  for (int it = 0; it < max_iters; ++it) {
    const double next = sweep(state, run.pv);
    run.trace.push_back(next);
    if (next - overlap < tol) {
      run.converged = true;
      break;
    }
    overlap = next;
  }
  return run;
}

std::vector<double> stationarity_residuals(const PureState& state, const ProductVector& pv) {
  std::vector<double> res;
  res.reserve(static_cast<std::size_t>(state.parties()));
  for (int k = 0; k < state.parties(); ++k) {
    CVec chi = conditional_vector(state, pv, k);
    const cplx along = vdot(pv[k], chi);
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] -= along * pv[k][i];
    res.push_back(vec_norm(chi));
  }
  return res;
}

ClosestProductResult closest_product(const PureState& state, const OptimizerConfig& config) {
  const int n = state.parties();
  const int restarts = config.restarts > 0 ? config.restarts : 16 + 8 * n;

  // Real states get real starts first, so that ties between a real optimum and
  // phase-rotated copies of it resolve to the real one.
  const bool real_state = std::all_of(state.amps().begin(), state.amps().end(),
                                      [](cplx c) { return c.imag() == 0.0; });
  const std::size_t real_starts = real_state ? static_cast<std::size_t>(restarts) / 2 : 0;

  std::vector<AlternatingRun> runs(static_cast<std::size_t>(restarts));
  parallel_for(runs.size(), [&](std::size_t i) {
    ProductVector init = i == 0 ? dominant_product(state)
                                : random_product(state.dims(), config.seed * 1000003ULL + i, i <= real_starts);
    runs[i] = alternating_maximization(state, std::move(init), config.max_iters, config.tol);
  });

  std::size_t best = 0;
  double best_overlap = -1.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double ov = runs[i].trace.empty() ? std::abs(inner_product(state, runs[i].pv))
                                            : runs[i].trace.back();
    if (ov > best_overlap + 1e-12) {
      best_overlap = ov;
      best = i;
    }
  }

  ClosestProductResult result;
  result.pv = std::move(runs[best].pv);
  result.restarts_used = restarts;
  result.sweeps = static_cast<int>(runs[best].trace.size());

  for (int it = 0; it < config.polish_iters; ++it) {
    if (it % 8 == 0) {
      const auto res = stationarity_residuals(state, result.pv);
      if (*std::max_element(res.begin(), res.end()) <= config.polish_residual) break;
    }
    sweep(state, result.pv);
    ++result.sweeps;
  }

  for (auto& f : result.pv.factors) f = fix_phase(std::move(f));
  result.overlap = std::abs(inner_product(state, result.pv));
  result.residuals = stationarity_residuals(state, result.pv);
  result.certified = *std::max_element(result.residuals.begin(), result.residuals.end()) <=
                     config.certify_threshold;
  return result;
}

EntanglementVerdict is_entangled(const PureState& state, const ClosestProductResult& result,
                                 double tol, double eps_c) {
  EntanglementVerdict v;
  v.overlap = result.overlap;
  v.entangled = result.overlap <= 1.0 - tol;
  v.collection_nonempty = !collection(state, result.pv, eps_c).empty();
  std::ostringstream os;
  os.precision(17);
  os << "Lambda=" << result.overlap << " C_nonempty=" << (v.collection_nonempty ? 1 : 0);
  v.certificate = os.str();
  if (v.entangled != v.collection_nonempty)
    throw Error(ErrorCode::construction_failed,
                "entanglement criteria disagree (" + v.certificate +
                    "); optimizer likely stuck at a non-global maximum");
  return v;
}

}  // namespace hardyforge
