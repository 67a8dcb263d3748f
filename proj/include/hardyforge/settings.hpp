#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "hardyforge/types.hpp"

namespace hardyforge {

// Coordinates of a local vector in the party's (e0, e1) frame.
using Coord2 = std::array<cplx, 2>;

// Which dichotomic outcome absorbs the complement Q_k of the local qubit frame.
enum class ComplementPolicy { to_outcome_0, to_outcome_1 };

enum class Scenario { bell, hardy };

struct PartySettings {
  CVec e0, e1;
  Coord2 a_frame{}, b_frame{}, bbar_frame{};
  CVec a, b, bbar;  // embedded, unit norm
  ComplementPolicy policy_a = ComplementPolicy::to_outcome_0;
  ComplementPolicy policy_b = ComplementPolicy::to_outcome_1;

  int dim() const { return static_cast<int>(e0.size()); }
};

struct BellPlan {
  double gamma = 0.0;
  double lambda = 0.0;  // |h_A / h_I|
  double theta = 0.0;   // arg(h_A / h_I)
  double q = 0.0;
  cplx r;
  std::vector<double> x;  // degeneracy perturbation per party, usually empty
  bool perturbed() const {
    for (double xi : x)
      if (xi != 0.0) return true;
    return false;
  }
};

struct HardyPlan {
  int v = 0;  // 0-based party
  SubsetMask S;
  int s = 0;
  double y = 0.0;
  cplx z;
  std::map<int, cplx> c;  // party in A -> c_k at z
  cplx e, f;
  std::vector<double> x;  // added to the first frame coordinate of the unit b_k
  bool perturbed() const {
    for (double xi : x)
      if (xi != 0.0) return true;
    return false;
  }
};

struct MeasurementSettings {
  Scenario scenario = Scenario::bell;
  SubsetMask A;
  std::vector<PartySettings> parties;
  std::optional<BellPlan> bell;
  std::optional<HardyPlan> hardy;
  bool closed_form_stale = false;

  int size() const { return static_cast<int>(parties.size()); }
};

// Normalizes the frame coordinates and embeds them through (e0, e1).
PartySettings make_party(const CVec& e0, const CVec& e1, const Coord2& a, const Coord2& b,
                         const Coord2& bbar);

CVec embed(const CVec& e0, const CVec& e1, const Coord2& coords);
Coord2 normalized(const Coord2& v);

// delta_k = min(|<a|b>|, |<a|bbar>|); zero when a lies in the b-basis.
double degeneracy(const PartySettings& p);
std::vector<double> degeneracy_metrics(const MeasurementSettings& s);
bool nondegenerate(const MeasurementSettings& s, double threshold = 1e-6);

const char* to_string(ComplementPolicy p);
const char* to_string(Scenario s);

}  // namespace hardyforge
