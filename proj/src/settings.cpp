#include "hardyforge/settings.hpp"

#include <algorithm>

namespace hardyforge {

Coord2 normalized(const Coord2& v) {
  const double nrm = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  if (!(nrm > 0.0)) throw Error(ErrorCode::invalid_argument, "zero measurement vector");
  return {v[0] / nrm, v[1] / nrm};
}

CVec embed(const CVec& e0, const CVec& e1, const Coord2& coords) {
  CVec out(e0.size());
  for (std::size_t i = 0; i < e0.size(); ++i) out[i] = coords[0] * e0[i] + coords[1] * e1[i];
  return out;
}

PartySettings make_party(const CVec& e0, const CVec& e1, const Coord2& a, const Coord2& b,
                         const Coord2& bbar) {
  PartySettings p;
  p.e0 = e0;
  p.e1 = e1;
  p.a_frame = normalized(a);
  p.b_frame = normalized(b);
  p.bbar_frame = normalized(bbar);
  p.a = embed(e0, e1, p.a_frame);
  p.b = embed(e0, e1, p.b_frame);
  p.bbar = embed(e0, e1, p.bbar_frame);
  return p;
}

double degeneracy(const PartySettings& p) {
  return std::min(std::abs(vdot(p.a, p.b)), std::abs(vdot(p.a, p.bbar)));
}

std::vector<double> degeneracy_metrics(const MeasurementSettings& s) {
  std::vector<double> out;
  for (const auto& p : s.parties) out.push_back(degeneracy(p));
  return out;
}

bool nondegenerate(const MeasurementSettings& s, double threshold) {
  for (const auto& p : s.parties)
    if (!(degeneracy(p) > threshold)) return false;
  return true;
}

const char* to_string(ComplementPolicy p) {
  return p == ComplementPolicy::to_outcome_0 ? "complement-to-outcome-0" : "complement-to-outcome-1";
}

const char* to_string(Scenario s) { return s == Scenario::bell ? "Bell" : "Hardy"; }

}  // namespace hardyforge
