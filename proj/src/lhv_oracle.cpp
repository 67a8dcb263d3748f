#include "hardyforge/lhv_oracle.hpp"

#include <algorithm>
#include <array>
#include <mutex>

#include "hardyforge/parallel.hpp"

namespace hardyforge {

int hardy_value(const Assignment& x) {
  const std::uint64_t full = (std::uint64_t{1} << x.n) - 1;
  const std::uint64_t a = x.bits & full;
  const std::uint64_t b = (x.bits >> x.n) & full;
  int h = (a == full ? 1 : 0) - (b == 0 ? 1 : 0);
  for (int k = 0; k < x.n; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    // a_{k-bar} = 1 iff every a_j with j != k is set
    if ((b & bit) && (a | bit) == full) --h;
  }
  return h;
}

namespace {

void check_range(int n) {
  if (n < 2 || n > 13)
    throw Error(ErrorCode::out_of_range, "LHV enumeration supports 2 <= n <= 13, got " + std::to_string(n));
}

struct Chunk {
  int max_value = -1000;
  std::uint64_t count = 0;
  std::vector<Assignment> samples;
};

constexpr std::size_t kSampleCap = 16;

}  // namespace

ClassicalMax classical_max(int n) {
  check_range(n);
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  const std::size_t chunks = 64;
  const std::uint64_t per = (total + chunks - 1) / chunks;
  std::vector<Chunk> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Chunk& part = parts[c];
    const std::uint64_t lo = c * per;
    const std::uint64_t hi = std::min(total, lo + per);
    for (std::uint64_t bits = lo; bits < hi; ++bits) {
      const Assignment x{bits, n};
      const int h = hardy_value(x);
      if (h > part.max_value) {
        part.max_value = h;
        part.count = 0;
        part.samples.clear();
      }
      if (h == part.max_value) {
        ++part.count;
        if (part.samples.size() < kSampleCap) part.samples.push_back(x);
      }
    }
  });

  ClassicalMax out;
  out.assignments = total;
  out.max_value = -1000;
  for (const auto& part : parts) {
    if (part.count == 0) continue;
    if (part.max_value > out.max_value) {
      out.max_value = part.max_value;
      out.maximizer_count = 0;
      out.sample_maximizers.clear();
    }
    if (part.max_value == out.max_value) {
      out.maximizer_count += part.count;
      for (const auto& s : part.samples)
        if (out.sample_maximizers.size() < kSampleCap) out.sample_maximizers.push_back(s);
    }
  }
  return out;
}

int classical_bound(int n) {
  check_range(n);
  static std::mutex mu;
  static std::array<int, 14> cache{};
  static std::array<bool, 14> known{};
  {
    std::lock_guard lock(mu);
    if (known[n]) return cache[n];
  }
  const int value = classical_max(n).max_value;
  std::lock_guard lock(mu);
  cache[n] = value;
  known[n] = true;
  return value;
}

bool contextual_impossibility(int n) {
  check_range(n);
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  const std::size_t chunks = 64;
  const std::uint64_t per = (total + chunks - 1) / chunks;
  std::vector<char> found(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t lo = c * per;
    const std::uint64_t hi = std::min(total, lo + per);
    for (std::uint64_t bits = lo; bits < hi; ++bits) {
      const Assignment x{bits, n};
      bool a_all = true, bbar_all = true;
      for (int k = 0; k < n; ++k) {
        a_all = a_all && x.a(k);
        bbar_all = bbar_all && !x.b(k);
      }
      if (!a_all || bbar_all) continue;
      bool cross_all_zero = true;
      for (int k = 0; k < n && cross_all_zero; ++k) {
        if (!x.b(k)) continue;
        bool others = true;
        for (int j = 0; j < n && others; ++j)
          if (j != k) others = x.a(j);
        cross_all_zero = !others;
      }
      if (cross_all_zero) {
        found[c] = 1;
        return;
      }
    }
  });
  return std::none_of(found.begin(), found.end(), [](char f) { return f != 0; });
}

double JointTable::p_a_all() const { return dist.at(0).at((std::size_t{1} << n) - 1); }

double JointTable::p_bbar_all() const { return dist.at((std::size_t{1} << n) - 1).at(0); }

double JointTable::p_cross(int k) const {
  return dist.at(std::size_t{1} << k).at((std::size_t{1} << n) - 1);
}

namespace {

struct LocalMeasurement {
  Eigen::MatrixXcd change;  // rows are <basis_j|
  std::vector<int> label;   // outcome of basis vector j
};

// Gram-Schmidt completion of an orthonormal set to a basis of C^d.
std::vector<CVec> complete_basis(std::vector<CVec> vecs, int d) {
  for (int i = 0; i < d && static_cast<int>(vecs.size()) < d; ++i) {
    CVec cand = basis_vector(d, i);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : vecs) {
        const cplx ov = vdot(v, cand);
        for (int t = 0; t < d; ++t) cand[t] -= ov * v[t];
      }
    if (vec_norm(cand) > 1e-6) vecs.push_back(hardyforge::normalized(std::move(cand)));
  }
  return vecs;
}

LocalMeasurement make_measurement(const PartySettings& p, bool use_b) {
  const int d = p.dim();
  std::vector<CVec> basis;
  std::vector<int> label;
  if (use_b) {
    basis = {p.b, p.bbar};
    label = {1, 0};
  } else {
    const Coord2 perp{-std::conj(p.a_frame[1]), std::conj(p.a_frame[0])};
    basis = {p.a, embed(p.e0, p.e1, perp)};
    label = {1, 0};
  }
  basis = complete_basis(std::move(basis), d);
  const ComplementPolicy pol = use_b ? p.policy_b : p.policy_a;
  while (static_cast<int>(label.size()) < d)
    label.push_back(pol == ComplementPolicy::to_outcome_1 ? 1 : 0);

  LocalMeasurement m;
  m.change = Eigen::MatrixXcd(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) m.change(j, i) = std::conj(basis[j][i]);
  m.label = std::move(label);
  return m;
}

}  // namespace

JointTable joint_distribution(const PureState& state, const MeasurementSettings& settings) {
  const int n = state.parties();
  if (n > 6) throw Error(ErrorCode::out_of_range, "joint_distribution supports n <= 6");
  if (settings.size() != n) throw Error(ErrorCode::dimension_mismatch, "settings party count differs");
  for (int k = 0; k < n; ++k)
    if (settings.parties[k].dim() != state.dim(k))
      throw Error(ErrorCode::dimension_mismatch, "settings dimension differs for party " + std::to_string(k + 1));

  std::vector<std::array<LocalMeasurement, 2>> meas;
  for (int k = 0; k < n; ++k)
    meas.push_back({make_measurement(settings.parties[k], false), make_measurement(settings.parties[k], true)});

  JointTable table;
  table.n = n;
  const std::size_t combos = std::size_t{1} << n;
  table.dist.assign(combos, std::vector<double>(combos, 0.0));
  for (std::size_t c = 0; c < combos; ++c) {
    CVec t = state.amp_vector();
    for (int k = 0; k < n; ++k) t = apply_local(t, state.dims(), k, meas[k][(c >> k) & 1u].change);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      std::size_t rem = flat;
      std::size_t outcome = 0;
      for (int k = n - 1; k >= 0; --k) {
        const auto d = static_cast<std::size_t>(state.dim(k));
        const int j = static_cast<int>(rem % d);
        rem /= d;
        if (meas[k][(c >> k) & 1u].label[j]) outcome |= std::size_t{1} << k;
      }
      table.dist[c][outcome] += std::norm(t[flat]);
    }
  }

  const double total_weight = norm2(state.amp_vector());
  for (std::size_t c = 0; c < combos; ++c) {
    double s = 0.0;
    for (double p : table.dist[c]) s += p;
    table.normalization_residual = std::max(table.normalization_residual, std::abs(s - total_weight));
  }

  for (std::size_t c = 0; c < combos; ++c)
    for (int k = 0; k < n; ++k) {
      const std::size_t other = c ^ (std::size_t{1} << k);
      if (other < c) continue;
      for (std::size_t o = 0; o < combos; ++o) {
        if ((o >> k) & 1u) continue;
        const std::size_t o1 = o | (std::size_t{1} << k);
        const double lhs = table.dist[c][o] + table.dist[c][o1];
        const double rhs = table.dist[other][o] + table.dist[other][o1];
        table.no_signaling_residual = std::max(table.no_signaling_residual, std::abs(lhs - rhs));
      }
    }

  for (int k = 0; k < n; ++k) {
    const PartySettings& p = settings.parties[k];
    const Eigen::MatrixXcd rho = reduced_density(state, k);
    const auto d = static_cast<Eigen::Index>(p.dim());
    auto outer = [d](const CVec& v) {
      Eigen::MatrixXcd m(d, d);
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = v[r] * std::conj(v[c]);
      return m;
    };
    const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(d, d) - outer(p.b) - outer(p.bbar);
    for (int use_b = 0; use_b < 2; ++use_b) {
      Eigen::MatrixXcd proj = use_b ? outer(p.b) : outer(p.a);
      const ComplementPolicy pol = use_b ? p.policy_b : p.policy_a;
      if (pol == ComplementPolicy::to_outcome_1) proj += q;
      const double expected = (rho * proj).trace().real();
      const std::size_t c = use_b ? (std::size_t{1} << k) : 0;
      double got = 0.0;
      for (std::size_t o = 0; o < combos; ++o)
        if ((o >> k) & 1u) got += table.dist[c][o];
      table.marginal_residual = std::max(table.marginal_residual, std::abs(got - expected));
    }
  }
  return table;
}

}  // namespace hardyforge
