#include "selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace koop {

double growth_ratio(double w_l0, double w_l1) {
  if (w_l0 == 0.0) return std::numeric_limits<double>::infinity();
  return w_l1 / w_l0 - 1.0;
}

std::vector<CandidateEigenpair> select_frequencies(const NormTable& table,
                                                   const SelectionConfig& cfg) {
  if (cfg.l0 < 1 || cfg.l1 <= cfg.l0)
    throw std::invalid_argument("selection needs 1 <= l0 < l1");
  if (cfg.l1 > static_cast<int>(table.lambdas.size()))
    throw std::invalid_argument("l1 exceeds the computed spectral basis");

  std::vector<CandidateEigenpair> out;
  for (int i = 0; i < table.grid.n; ++i) {
    CandidateEigenpair c;
    c.omega = table.grid.omegas[i];
    c.r = table.grid.r_of_index(i);
    c.w_l0 = table.w_at(i, cfg.l0);
    c.w_l1 = table.w_at(i, cfg.l1);
    c.ratio = growth_ratio(c.w_l0, c.w_l1);
    if (c.w_l0 > cfg.delta0 && c.ratio <= cfg.delta1) out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const CandidateEigenpair& a, const CandidateEigenpair& b) {
              if (a.w_l1 != b.w_l1) return a.w_l1 < b.w_l1;
              return std::abs(a.omega) < std::abs(b.omega);
            });
  return out;
}

std::vector<double> frequency_lattice(double a1, double a2, int max_order,
                                      double dt) {
  const double nyq = M_PI / dt;
  std::set<double> seen;
  for (int n1 = -max_order; n1 <= max_order; ++n1)
    for (int n2 = -(max_order - std::abs(n1)); n2 <= max_order - std::abs(n1);
         ++n2) {
      double w = n1 * a1 + n2 * a2;
      // Fold into [-pi/dt, pi/dt).
      w = std::remainder(w, 2.0 * nyq);
      if (w >= nyq) w -= 2.0 * nyq;
      seen.insert(w);
    }
  return std::vector<double>(seen.begin(), seen.end());
}

}  // namespace koop
