#pragma once

#include "idcl/density.hpp"

#include <vector>

namespace idcl {

// "Slow then fast" exponential pacing schedule.
struct PaceSchedule {
  double zeta0 = 0.6;    // initial proportion, in (0, 1)
  double zeta_max = 0.95;  // cap, in (zeta0, 1]
  int t_grow = 50;       // epochs for the uncapped curve to reach 1

  void validate() const;
};

// Uncapped curve 2^(-(log2 zeta0 / t_grow) * t + log2 zeta0), evaluated in
// the algebraically identical form zeta0^(1 - t / t_grow). Equals zeta0 at
// t = 0, reaches 1 at t = t_grow, strictly increasing and convex in t.
double pace_uncapped(int t, const PaceSchedule& sched);

// min(zeta_max, pace_uncapped(t)).
double pace(int t, const PaceSchedule& sched);

// Per-epoch training subset D^t.
struct Curriculum {
  int epoch = 0;
  double zeta_t = 0.0;
  std::vector<bool> indicator;  // v_i^t over all n samples
  std::vector<int> selected;    // sorted sample ids with indicator true
};

// Easy-sample indicator for one cluster: member i is selected iff delta_i >=
// the max(1, ceil(zeta_t * |C|))-th largest member score. Ties at the
// threshold are all selected. Returned flags are parallel to
// cluster_members.
std::vector<bool> select_easy(const std::vector<int>& cluster_members,
                              const std::vector<double>& delta, double zeta_t);

// Applies select_easy to every cluster and unions the picks. clusters must
// be nonempty lists that partition 0..n-1; every cluster contributes at
// least one sample.
Curriculum generate_curriculum(const std::vector<std::vector<int>>& clusters,
                               const DensityProfile& profile, int t,
                               const PaceSchedule& sched);

}  // namespace idcl
