#include "rgmm/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "rgmm/errors.hpp"

namespace rgmm {

double ProfileTable::pi(std::size_t solver, std::size_t tau_index) const {
  if (instances == 0) return 0.0;
  return static_cast<double>(solved.at(solver).at(tau_index)) / static_cast<double>(instances);
}

std::vector<double> default_tau_grid() {
  constexpr int kPoints = 200;
  std::vector<double> tau(kPoints);
  for (int i = 0; i < kPoints; ++i) tau[i] = std::pow(10.0, 2.0 * i / (kPoints - 1));
  tau.front() = 1.0;
  tau.back() = 100.0;
  return tau;
}

ProfileTable performance_profile(std::span<const ProfileSample> samples, const std::string& metric,
                                 const std::vector<double>& tau_grid) {
  if (samples.empty()) throw ConfigError("performance_profile: no records");
  if (tau_grid.empty()) throw ConfigError("performance_profile: empty tau grid");

  std::set<std::string> solver_set, instance_set;
  std::map<std::pair<std::string, std::string>, const ProfileSample*> cell;
  for (const ProfileSample& s : samples) {
    solver_set.insert(s.solver);
    instance_set.insert(s.instance);
    if (!cell.emplace(std::make_pair(s.instance, s.solver), &s).second)
      throw ConfigError("performance_profile: duplicate record for instance '" + s.instance +
                        "', solver '" + s.solver + "'");
  }

  ProfileTable t;
  t.metric = metric;
  t.tau = tau_grid;
  t.solvers.assign(solver_set.begin(), solver_set.end());
  t.instances = static_cast<long>(instance_set.size());
  t.solved.assign(t.solvers.size(), std::vector<long>(tau_grid.size(), 0));
  t.failures.assign(t.solvers.size(), 0);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(t.solvers.size());
  for (const std::string& inst : instance_set) {
    double best = kInf;
    for (std::size_t s = 0; s < t.solvers.size(); ++s) {
      auto it = cell.find({inst, t.solvers[s]});
      if (it == cell.end())
        throw ConfigError("performance_profile: solver '" + t.solvers[s] +
                          "' has no record for instance '" + inst + "'");
      const ProfileSample& smp = *it->second;
      cost[s] = smp.success ? smp.cost : kInf;
      if (!smp.success) ++t.failures[s];
      best = std::min(best, cost[s]);
    }
    if (best == kInf) continue;
    for (std::size_t s = 0; s < t.solvers.size(); ++s) {
      if (cost[s] == kInf) continue;
      // t_S / t_best <= tau, multiplied out so ties and integer metrics are exact
      for (std::size_t i = 0; i < tau_grid.size(); ++i)
        if (cost[s] <= tau_grid[i] * best) ++t.solved[s][i];
    }
  }
  return t;
}

void write_profile_csv(std::ostream& out, const ProfileTable& t) {
  out << "metric,solver,tau,solved,instances,failures,pi\n" << std::setprecision(17);
  for (std::size_t s = 0; s < t.solvers.size(); ++s)
    for (std::size_t i = 0; i < t.tau.size(); ++i)
      out << t.metric << ',' << t.solvers[s] << ',' << t.tau[i] << ',' << t.solved[s][i] << ','
          << t.instances << ',' << t.failures[s] << ',' << t.pi(s, i) << '\n';
}

ProfileTable read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "metric,solver,tau,solved,instances,failures,pi")
    throw ConfigError("profile csv: unexpected header");
  ProfileTable t;
  std::map<std::string, std::size_t> index;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cellv;
    while (std::getline(ss, cellv, ',')) f.push_back(cellv);
    if (f.size() != 7) throw ConfigError("profile csv line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      t.metric = f[0];
      auto [it, fresh] = index.emplace(f[1], t.solvers.size());
      if (fresh) {
        t.solvers.push_back(f[1]);
        t.solved.emplace_back();
        t.failures.push_back(std::stol(f[5]));
      }
      const double tau = std::stod(f[2]);
      if (it->second == 0) t.tau.push_back(tau);
      t.solved[it->second].push_back(std::stol(f[3]));
      t.instances = std::stol(f[4]);
    } catch (const std::logic_error&) {
      throw ConfigError("profile csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  for (const auto& row : t.solved)
    if (row.size() != t.tau.size()) throw ConfigError("profile csv: ragged tau grid");
  return t;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_profile_svg(std::ostream& out, const ProfileTable& t) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double lo = t.tau.empty() ? 0.0 : std::log10(t.tau.front());
  double hi = t.tau.empty() ? 1.0 : std::log10(t.tau.back());
  if (hi <= lo) hi = lo + 1.0;
  auto px = [&](double tau) { return kLeft + (std::log10(tau) - lo) / (hi - lo) * plot_w; };
  auto py = [&](double pi) { return kTop + (1.0 - pi) * plot_h; };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<title>performance profile: " << xml_escape(t.metric) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  out << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\"/>\n</g>\n";
  out << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int d = static_cast<int>(std::ceil(lo)); d <= static_cast<int>(std::floor(hi)); ++d)
    out << "<text x=\"" << px(std::pow(10.0, d)) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  for (int k = 0; k <= 4; ++k)
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(k / 4.0) + 4
        << "\" text-anchor=\"end\">" << k / 4.0 << "</text>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">tau (" << xml_escape(t.metric) << ")</text>\n</g>\n";

  for (std::size_t s = 0; s < t.solvers.size(); ++s) {
    out << "<polyline class=\"profile\" data-solver=\"" << xml_escape(t.solvers[s])
        << "\" fill=\"none\" stroke=\"" << kColors[s % 8] << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < t.tau.size(); ++i) {
      const double y = py(t.pi(s, i));
      out << px(t.tau[i]) << ',' << y << ' ';
      const double next = i + 1 < t.tau.size() ? t.tau[i + 1] : t.tau[i];
      out << px(next) << ',' << y << ' ';
    }
    out << "\"/>\n";
  }
  out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t s = 0; s < t.solvers.size(); ++s) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(s);
    out << "<line x1=\"" << kLeft + plot_w + 15 << "\" y1=\"" << y << "\" x2=\""
        << kLeft + plot_w + 35 << "\" y2=\"" << y << "\" stroke=\"" << kColors[s % 8]
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 40 << "\" y=\"" << y + 4 << "\">"
        << xml_escape(t.solvers[s]) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

void write_profile_csv_file(const std::string& path, const ProfileTable& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_profile_csv(out, table);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

void write_profile_svg_file(const std::string& path, const ProfileTable& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_profile_svg(out, table);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace rgmm
