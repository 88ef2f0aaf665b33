#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <system_error>

#include "cbo/cbo.hpp"
#include "cli/config.hpp"

namespace cbo::cli {

struct Options {
  std::filesystem::path out_dir = ".";
  std::size_t jobs = 0;  // 0 = hardware concurrency
  bool emit_plot_data = false;
  bool trajectory = false;
};

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kIncomplete = 2,  // t_max reached, slope undefined, or an invariant failed
  kHypothesis = 3,
  kInternal = 4,
};

/// Writes through a temporary file and renames it into place, so a failed
/// command never leaves a partial artifact behind.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::function<void(std::ostream&)>& body) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw std::runtime_error("cannot write '" + tmp.string() + "'");
      body(os);
      os.flush();
      if (!os) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

namespace detail {

// Six significant digits for human-readable summaries; restored on exit.
struct Summary {
  std::ostream& os;
  std::streamsize saved;
  explicit Summary(std::ostream& o) : os(o), saved(o.precision(6)) {}
  ~Summary() { os.precision(saved); }
};

inline void write_plot_data(const std::filesystem::path& path,
                            const analysis::SweepReport<double>& report) {
  const bool log_log = report.param_name == "alpha";
  write_file_atomic(path, [&](std::ostream& os) {
    os << (log_log ? "# log_alpha log_abs_error\n" : "# ln_N abs_error\n");
    os << std::setprecision(17);
    for (const auto& r : report.rows) {
      if (!(r.abs_error > 0)) continue;
      os << std::log(r.param) << ' ' << (log_log ? std::log(r.abs_error) : r.abs_error) << '\n';
    }
  });
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const hypothesis_error& e) {
    err << "error: " << e.what() << '\n';
    return kHypothesis;
  } catch (const invariant_error& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
}

inline void print_fit(std::ostream& os, const analysis::SweepReport<double>& report) {
  if (report.fitted_slope)
    os << "fitted_slope=" << *report.fitted_slope << " slope_stderr=" << report.slope_stderr
       << " rows_fitted=" << report.fitted_rows << '\n';
  else
    os << "fitted_slope=undefined rows_fitted=" << report.fitted_rows << '\n';
}

}  // namespace detail

inline int cmd_simulate(const ExperimentConfig& cfg, const Options& opt, std::ostream& out,
                        std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto obj = build_objective(cfg.objective);
    SimConfig<double> sim = cfg.sim;
    validate_sim(sim, obj);
    sim.record_trajectory = true;
    if (opt.trajectory) sim.sample_stride = 1;

    const auto result = simulate(obj, sim);
    write_file_atomic(opt.out_dir / "trajectory.csv",
                      [&](std::ostream& os) { write_trajectory_csv(os, *result.trajectory); });

    detail::Summary s(out);
    out << "x_inf_estimate=" << result.x_inf_estimate;
    if (result.error_to_minimizer) out << " error_to_minimizer=" << *result.error_to_minimizer;
    out << " stop_reason=" << to_string(result.stop_reason) << " final_gap=" << result.final_gap
        << " t=" << result.final_time;
    if (result.trajectory->crossing_time)
      out << " first_crossing_t=" << *result.trajectory->crossing_time;
    out << '\n';
    return result.stop_reason == StopReason::gap_converged ? kOk : kIncomplete;
  });
}

inline int cmd_sweep_alpha(const ExperimentConfig& cfg, const Options& opt, std::ostream& out,
                           std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto obj = build_objective(cfg.objective);
    validate_sim(cfg.sim, obj);
    if (cfg.sweep_alphas.empty()) throw config_error("sweep-alpha.alphas: grid is empty");
    if (!obj.known_minimizer) throw config_error("objective: sweep needs a known minimizer");

    const auto report = analysis::sweep_alpha(obj, cfg.sim, cfg.sweep_alphas, opt.jobs);
    write_file_atomic(opt.out_dir / "sweep_alpha.csv",
                      [&](std::ostream& os) { analysis::write_sweep_csv(os, report); });
    if (opt.emit_plot_data) detail::write_plot_data(opt.out_dir / "sweep_alpha_plot.dat", report);

    detail::Summary s(out);
    for (const auto& r : report.rows) {
      out << "alpha=" << r.param << " abs_error=" << r.abs_error;
      if (r.bound_lower) out << " lower=" << *r.bound_lower;
      if (r.bound_upper) out << " upper=" << *r.bound_upper;
      out << '\n';
    }
    detail::print_fit(out, report);
    return report.fitted_slope ? kOk : kIncomplete;
  });
}

inline int cmd_sweep_n(const ExperimentConfig& cfg, const Options& opt, std::ostream& out,
                       std::ostream& err) {
  return detail::guarded(err, [&] {
    validate_scalars(cfg.sim);
    if (cfg.sweep_ns.empty()) throw config_error("sweep-n.ns: grid is empty");
    const double alpha = cfg.sweep_n_alpha.value_or(cfg.sim.alpha);
    const auto report = analysis::sweep_n(alpha, cfg.sweep_n_width, cfg.sweep_ns, cfg.sweep_n_j,
                                          cfg.sim, opt.jobs);
    write_file_atomic(opt.out_dir / "sweep_n.csv",
                      [&](std::ostream& os) { analysis::write_sweep_csv(os, report); });
    if (opt.emit_plot_data) detail::write_plot_data(opt.out_dir / "sweep_n_plot.dat", report);

    detail::Summary s(out);
    for (const auto& r : report.rows)
      out << "N=" << r.param << " abs_error=" << r.abs_error << " oracle=" << *r.oracle
          << " mismatch=" << std::abs(r.abs_error - *r.oracle) << '\n';
    detail::print_fit(out, report);
    return report.fitted_slope ? kOk : kIncomplete;
  });
}

inline int cmd_certify(const ExperimentConfig& cfg, const Options&, std::ostream& out,
                       std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto obj = build_objective(cfg.objective);
    const auto cert = analysis::certify_calyx(obj, cfg.grid_n);

    detail::Summary s(out);
    out << "x_star=" << cert.x_star << '\n'
        << "f2_at_x_star=" << cert.curvature_at_minimizer << '\n'
        << "r1=" << cert.r1 << '\n'
        << "c1=" << cert.c1 << '\n'
        << "C1=" << cert.C1 << '\n'
        << "f_star=" << cert.f_star << '\n'
        << "f1=" << cert.f1 << '\n'
        << "delta=" << cert.delta << '\n'
        << "r2=" << cert.r2 << '\n'
        << "c2=" << cert.c2 << '\n'
        << "alpha0=" << cert.alpha0 << '\n'
        << "note: alpha0 is the threshold built from 1/(alpha0*c2) = r2; it is reported in place "
           "of the existence threshold alpha_1, whose relation to alpha0 is not made explicit\n"
        << "sqrt_rate_constant=" << cert.sqrt_rate_constant() << '\n';
    for (double a : cfg.certify_alphas) {
      out << "B(" << a << ")=" << cert.bound(a);
      if (!cert.applies(a)) out << " (alpha <= alpha0: bound not certified)";
      out << '\n';
    }
    return kOk;
  });
}

inline int cmd_verify(const ExperimentConfig& cfg, const Options& opt, std::ostream& out,
                      std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto obj = build_objective(cfg.objective);
    SimConfig<double> sim = cfg.sim;
    validate_sim(sim, obj);
    if (opt.trajectory) sim.sample_stride = 1;

    const auto report = analysis::verify_invariants(obj, sim);
    if (opt.trajectory && report.outcome && report.outcome->trajectory)
      write_file_atomic(opt.out_dir / "trajectory.csv", [&](std::ostream& os) {
        write_trajectory_csv(os, *report.outcome->trajectory);
      });

    detail::Summary s(out);
    for (const auto& c : report.checks)
      out << (c.passed ? "PASS " : "FAIL ") << c.name << " worst_residual=" << c.worst_residual
          << " threshold=" << c.threshold << '\n';
    if (report.outcome) out << "samples=" << report.samples << " stop_reason="
                            << to_string(report.outcome->stop_reason) << '\n';
    return report.all_passed() ? kOk : kIncomplete;
  });
}

}  // namespace cbo::cli
