#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rgmm {

/// One solver's cost on one profile instance. Failed runs carry no cost.
struct ProfileSample {
  std::string instance;
  std::string solver;
  double cost = 0.0;
  bool success = true;
};

/// Dolan-More performance profile
///
///   pi_S(tau) = #{P : t_P^S <= tau * min_S' t_P^S'} / #{P}
///
/// with t_P^S = infinity on failure. solved[s][i] holds the numerator for
/// solver s at tau[i], so pi is an exact ratio of integers.
struct ProfileTable {
  std::string metric;
  std::vector<double> tau;
  std::vector<std::string> solvers;  // sorted
  std::vector<std::vector<long>> solved;
  std::vector<long> failures;
  long instances = 0;

  double pi(std::size_t solver, std::size_t tau_index) const;
  bool operator==(const ProfileTable&) const = default;
};

/// 200 geometric points on [1, 100].
std::vector<double> default_tau_grid();

/// Throws ConfigError on an empty sample set, a missing (instance, solver)
/// pair or a duplicate one. Tied best solvers all get ratio 1.
ProfileTable performance_profile(std::span<const ProfileSample> samples, const std::string& metric,
                                 const std::vector<double>& tau_grid);

// Long-form CSV, one row per (solver, tau):
//   metric,solver,tau,solved,instances,failures,pi
void write_profile_csv(std::ostream& out, const ProfileTable& table);
ProfileTable read_profile_csv(std::istream& in);

/// Log-x step plot, one <polyline class="profile" data-solver="..."> per
/// solver plus a legend <g class="legend"> with one <text> per solver.
void write_profile_svg(std::ostream& out, const ProfileTable& table);

void write_profile_csv_file(const std::string& path, const ProfileTable& table);
void write_profile_svg_file(const std::string& path, const ProfileTable& table);

}  // namespace rgmm
