#pragma once

// Experiment configuration: an INI file with one section per concern.
//
//   [objective]   name, params, domain, table
//   [sim]         lambda, alpha, initial_positions, integrator, dt, gap_tol,
//                 t_max, sample_stride
//   [sweep-alpha] alphas
//   [sweep-n]     alpha, width, ns, j
//   [certify]     grid_n, alphas
//
// Lists are whitespace- or comma-separated. Unknown sections and keys are
// rejected so typos do not silently fall back to defaults.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbo/analysis/calyx.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/objective.hpp"

namespace cbo::cli {

class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

struct ObjectiveSpec {
  std::string name = "linear";
  std::vector<double> params;
  std::optional<Interval<double>> domain;
  std::string table_path;  // custom-table only
};

struct ExperimentConfig {
  ObjectiveSpec objective;
  SimConfig<double> sim;
  bool dt_given = false;

  std::vector<double> sweep_alphas;

  std::optional<double> sweep_n_alpha;  // falls back to sim.alpha
  double sweep_n_width = 1;
  std::vector<int> sweep_ns;
  int sweep_n_j = 1;

  std::size_t grid_n = analysis::kDefaultCalyxGrid;
  std::vector<double> certify_alphas;
};

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& key, std::string text) {
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<T> out;
  std::string token;
  while (in >> token) {
    std::istringstream one(token);
    T v{};
    std::string rest;
    if (!(one >> v) || (one >> rest)) throw config_error(key + ": cannot parse '" + token + "'");
    out.push_back(v);
  }
  return out;
}

template <class T>
T parse_scalar(const std::string& key, const std::string& text) {
  const auto v = parse_list<T>(key, text);
  if (v.size() != 1) throw config_error(key + ": expected a single value");
  return v.front();
}

template <class T>
void require_increasing(const std::string& key, const std::vector<T>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw config_error(key + ": grid must be strictly increasing");
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }

  static const std::map<std::string, std::set<std::string>> known = {
      {"objective", {"name", "params", "domain", "table"}},
      {"sim",
       {"lambda", "alpha", "initial_positions", "integrator", "dt", "gap_tol", "t_max",
        "sample_stride"}},
      {"sweep-alpha", {"alphas"}},
      {"sweep-n", {"alpha", "width", "ns", "j"}},
      {"certify", {"grid_n", "alphas"}},
  };

  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) {
      if (body.empty() && !body.data().empty())
        throw config_error("config: key '" + section + "' must be inside a section");
      throw config_error("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      if (!it->second.count(key)) throw config_error(name + ": unknown key");
      const std::string text = value.data();

      if (section == "objective") {
        if (key == "name") cfg.objective.name = text;
        else if (key == "params") cfg.objective.params = detail::parse_list<double>(name, text);
        else if (key == "table") cfg.objective.table_path = text;
        else if (key == "domain") {
          const auto d = detail::parse_list<double>(name, text);
          if (d.size() != 2 || !(d[0] < d[1]))
            throw config_error(name + ": expected two values lo < hi");
          cfg.objective.domain = Interval<double>{d[0], d[1]};
        }
      } else if (section == "sim") {
        auto& s = cfg.sim;
        if (key == "lambda") s.lambda = detail::parse_scalar<double>(name, text);
        else if (key == "alpha") s.alpha = detail::parse_scalar<double>(name, text);
        else if (key == "initial_positions") s.initial_positions = detail::parse_list<double>(name, text);
        else if (key == "integrator") {
          try {
            s.integrator = parse_integrator(text);
          } catch (const std::invalid_argument& e) {
            throw config_error(name + ": " + e.what());
          }
        } else if (key == "dt") {
          s.dt = detail::parse_scalar<double>(name, text);
          cfg.dt_given = true;
        } else if (key == "gap_tol") s.gap_tol = detail::parse_scalar<double>(name, text);
        else if (key == "t_max") s.t_max = detail::parse_scalar<double>(name, text);
        else if (key == "sample_stride") {
          const long stride = detail::parse_scalar<long>(name, text);
          if (stride <= 0) throw config_error("sample_stride: must be a positive integer");
          s.sample_stride = static_cast<std::size_t>(stride);
        }
      } else if (section == "sweep-alpha") {
        cfg.sweep_alphas = detail::parse_list<double>(name, text);
        detail::require_increasing(name, cfg.sweep_alphas);
      } else if (section == "sweep-n") {
        if (key == "alpha") cfg.sweep_n_alpha = detail::parse_scalar<double>(name, text);
        else if (key == "width") cfg.sweep_n_width = detail::parse_scalar<double>(name, text);
        else if (key == "j") cfg.sweep_n_j = detail::parse_scalar<int>(name, text);
        else if (key == "ns") {
          cfg.sweep_ns = detail::parse_list<int>(name, text);
          detail::require_increasing(name, cfg.sweep_ns);
        }
      } else if (section == "certify") {
        if (key == "grid_n") {
          const long n = detail::parse_scalar<long>(name, text);
          if (n < 3) throw config_error(name + ": must be at least 3");
          cfg.grid_n = static_cast<std::size_t>(n);
        } else if (key == "alphas") {
          cfg.certify_alphas = detail::parse_list<double>(name, text);
          detail::require_increasing(name, cfg.certify_alphas);
        }
      }
    }
  }

  if (!cfg.dt_given && cfg.sim.lambda > 0) cfg.sim.dt = 1e-3 / cfg.sim.lambda;
  if (!cfg.objective.table_path.empty()) {
    std::filesystem::path p(cfg.objective.table_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::exists(p))
      throw config_error("objective.table: file '" + p.string() + "' does not exist");
    cfg.objective.table_path = p.string();
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot read '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

inline Objective<double> build_objective(const ObjectiveSpec& spec) {
  try {
    if (spec.name == "custom-table") {
      if (spec.table_path.empty())
        return builtin_objective<double>(spec.name, std::span<const double>(spec.params),
                                         spec.domain);
      return table_objective_from_csv<double>(spec.table_path, spec.domain);
    }
    return builtin_objective<double>(spec.name, std::span<const double>(spec.params), spec.domain);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("objective: ") + e.what());
  }
}

/// SimConfig invariants that do not depend on particle positions.
inline void validate_scalars(const SimConfig<double>& s) {
  if (!(s.lambda > 0)) throw config_error("lambda: must be positive");
  if (!(s.alpha >= 0)) throw config_error("alpha: must be nonnegative");
  if (!(s.dt > 0)) throw config_error("dt: must be positive");
  if (!(s.gap_tol > 0)) throw config_error("gap_tol: must be positive");
  if (!(s.t_max > 0)) throw config_error("t_max: must be positive");
  if (!(s.dt * s.lambda < 1)) throw config_error("dt: dt * lambda must be < 1");
}

inline void validate_sim(const SimConfig<double>& s, const Objective<double>& obj) {
  validate_scalars(s);
  try {
    validate(s, obj);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

}  // namespace cbo::cli
