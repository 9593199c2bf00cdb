#include "idcl/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace idcl {

void PaceSchedule::validate() const {
  if (!(zeta0 > 0.0 && zeta0 < 1.0)) {
    throw std::invalid_argument("PaceSchedule: zeta0 must be in (0, 1)");
  }
  if (!(zeta_max > zeta0 && zeta_max <= 1.0)) {
    throw std::invalid_argument("PaceSchedule: zeta_max must be in (zeta0, 1]");
  }
  if (t_grow < 1) {
    throw std::invalid_argument("PaceSchedule: t_grow must be >= 1");
  }
}

double pace_uncapped(int t, const PaceSchedule& sched) {
  sched.validate();
  if (t < 0) {
    throw std::invalid_argument("pace: t must be >= 0");
  }
  if (t == 0) {
    return sched.zeta0;
  }
  const double exponent = 1.0 - static_cast<double>(t) / static_cast<double>(sched.t_grow);
  return std::pow(sched.zeta0, exponent);
}

double pace(int t, const PaceSchedule& sched) {
  return std::min(sched.zeta_max, pace_uncapped(t, sched));
}

std::vector<bool> select_easy(const std::vector<int>& cluster_members,
                              const std::vector<double>& delta, double zeta_t) {
  if (cluster_members.empty()) {
    throw std::invalid_argument("select_easy: empty cluster");
  }
  if (!(zeta_t > 0.0) || zeta_t > 1.0) {
    throw std::invalid_argument("select_easy: zeta_t must be in (0, 1]");
  }
  std::vector<double> scores;
  scores.reserve(cluster_members.size());
  for (int id : cluster_members) {
    if (id < 0 || static_cast<std::size_t>(id) >= delta.size()) {
      throw std::invalid_argument("select_easy: member id out of range");
    }
    scores.push_back(delta[static_cast<std::size_t>(id)]);
  }
  // Threshold = score at 1-based descending rank max(1, ceil(zeta_t * |C|)).
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto size = static_cast<std::ptrdiff_t>(sorted.size());
  auto rank =
      static_cast<std::ptrdiff_t>(std::ceil(zeta_t * static_cast<double>(size)));
  rank = std::clamp<std::ptrdiff_t>(rank, 1, size);
  const double threshold = sorted[static_cast<std::size_t>(rank - 1)];

  std::vector<bool> flags(cluster_members.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    flags[i] = scores[i] >= threshold;
  }
  return flags;
}

Curriculum generate_curriculum(const std::vector<std::vector<int>>& clusters,
                               const DensityProfile& profile, int t,
                               const PaceSchedule& sched) {
  const std::size_t n = profile.delta.size();
  std::vector<char> seen(n, 0);
  std::size_t covered = 0;
  for (const auto& members : clusters) {
    if (members.empty()) {
      throw std::invalid_argument("generate_curriculum: empty cluster");
    }
    for (int id : members) {
      if (id < 0 || static_cast<std::size_t>(id) >= n) {
        throw std::invalid_argument("generate_curriculum: member id out of range");
      }
      if (seen[static_cast<std::size_t>(id)]) {
        throw std::invalid_argument("generate_curriculum: clusters overlap at sample " +
                                    std::to_string(id));
      }
      seen[static_cast<std::size_t>(id)] = 1;
      ++covered;
    }
  }
  if (covered != n) {
    throw std::invalid_argument("generate_curriculum: clusters do not cover all samples");
  }

  Curriculum cur;
  cur.epoch = t;
  cur.zeta_t = pace(t, sched);
  cur.indicator.assign(n, false);
  for (const auto& members : clusters) {
    const std::vector<bool> flags = select_easy(members, profile.delta, cur.zeta_t);
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (flags[i]) {
        cur.indicator[static_cast<std::size_t>(members[i])] = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cur.indicator[i]) {
      cur.selected.push_back(static_cast<int>(i));
    }
  }
  return cur;
}

}  // namespace idcl
