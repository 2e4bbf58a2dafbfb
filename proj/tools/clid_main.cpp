#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "clid/experiment.hpp"

namespace fs = std::filesystem;

namespace {

clid::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return clid::ExperimentConfig{};  // built-in benchmark defaults
  return clid::parse_config_file(path);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

void write_fir(std::ostream& os, const std::string& name, const clid::FirSeq& seq) {
  char buf[64];
  if (seq.rows() == 1 && seq.cols() == 1) {
    os << name << ":";
    for (int k = 0; k < seq.tau(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", seq[k](0, 0));
      os << ' ' << buf;
    }
    os << '\n';
    return;
  }
  for (int k = 0; k < seq.tau(); ++k) {
    os << name << '[' << k << "]:";
    for (int i = 0; i < seq.rows(); ++i)
      for (int j = 0; j < seq.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", seq[k](i, j));
        os << ' ' << buf;
      }
    os << '\n';
  }
}

void write_method_report(std::ostream& os, const clid::MethodRun& mr) {
  os << "method: " << mr.method << '\n';
  for (int i = 0; i < mr.g_hat.rows(); ++i)
    for (int j = 0; j < mr.g_hat.cols(); ++j) {
      os << "g_hat";
      if (mr.g_hat.rows() > 1 || mr.g_hat.cols() > 1) os << '(' << i << ',' << j << ')';
      os << ":\n" << clid::to_text(mr.g_hat(i, j));
    }
  for (const auto& [name, seq] : mr.params) write_fir(os, name, seq);
  const clid::LsSolution& d = mr.diagnostics;
  os << "cost: " << d.cost << '\n'
     << "constraint_residual: " << d.constraint_residual << '\n'
     << "rank_constraints: " << d.rank_constraints << '\n'
     << "nullspace_dim: " << d.nullspace_dim << '\n'
     << "rank_reduced: " << d.rank_reduced << '\n'
     << "degenerate_cost: " << (d.degenerate_cost ? 1 : 0) << '\n'
     << "solve_time_s: " << mr.solve_time_s << '\n'
     << "stabilized: " << (mr.stabilized ? 1 : 0) << '\n';
}

void print_summary_table(const std::vector<clid::MethodSummary>& sums) {
  std::cout << std::left << std::setw(15) << "method" << std::right << std::setw(7) << "n"
            << std::setw(7) << "fail" << std::setw(7) << "stab" << std::setw(12) << "median"
            << std::setw(12) << "q1" << std::setw(12) << "q3" << std::setw(12) << "mean"
            << std::setw(11) << "time[s]" << '\n';
  for (const auto& s : sums)
    std::cout << std::left << std::setw(15) << s.method << std::right << std::setw(7) << s.count
              << std::setw(7) << s.failures << std::setw(7) << s.stabilized << std::fixed
              << std::setprecision(2) << std::setw(12) << s.median << std::setw(12) << s.q1
              << std::setw(12) << s.q3 << std::setw(12) << s.mean << std::setprecision(4)
              << std::setw(11) << s.mean_time << std::defaultfloat << '\n';
}

bool all_certified(const std::vector<clid::TrialRecord>& records) {
  for (const auto& r : records)
    if (r.failed || !r.stabilized) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-loop identification via convex parameterizations"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  bool strict = false;
  app.add_option("--config", config_path, "experiment config file (INI-style)");
  app.add_option("--out", out_override, "output directory (overrides the config)");
  app.add_flag("--strict", strict,
               "exit 2 when any estimate misses the closed-loop stability certificate");

  auto* cmd_sim = app.add_subcommand("simulate", "one closed-loop record to sim.csv");
  auto* cmd_idf = app.add_subcommand("identify", "one record, every method, text reports");
  auto* cmd_cmp = app.add_subcommand("compare", "Monte Carlo comparison: errors.csv, summary.csv");
  auto* cmd_swp = app.add_subcommand("sweep-n", "error vs record length: sweep.csv");
  auto* cmd_bod = app.add_subcommand("bode", "true and estimated frequency responses");
  for (auto* sub : {cmd_sim, cmd_idf, cmd_cmp, cmd_swp, cmd_bod}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    clid::ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    const fs::path out = cfg.out_dir;

    if (cmd_sim->parsed()) {
      const clid::PreparedSystem sys = clid::prepare_system(cfg);
      const clid::Signal r = clid::prbs({cfg.order, cfg.amplitude, cfg.prbs_seed});
      const clid::Signal e = clid::gaussian(r.length(), 1, cfg.sigma, cfg.base_seed);
      const clid::SimResult res = clid::simulate(sys.plant, r, e);
      auto f = open_out(out, "sim.csv");
      f << "# r\n";
      clid::write_csv(r, f);
      f << "# e\n";
      clid::write_csv(e, f);
      f << "# u\n";
      clid::write_csv(res.u, f);
      f << "# y\n";
      clid::write_csv(res.y, f);
      std::cout << "wrote " << (out / "sim.csv").string() << " (" << r.length() << " samples)\n";
      return 0;
    }

    if (cmd_idf->parsed()) {
      const clid::PreparedSystem sys = clid::prepare_system(cfg);
      const std::vector<std::string> methods = clid::expand_methods(cfg);
      const clid::Signal r = clid::prbs({cfg.order, cfg.amplitude, cfg.prbs_seed});
      const clid::Signal e = clid::gaussian(r.length(), 1, cfg.sigma, cfg.base_seed);
      const clid::SimResult rec = clid::simulate(sys.plant, r, e);
      clid::SimResult auxrec;
      const bool need_aux =
          std::count(methods.begin(), methods.end(), std::string("dyp_two_stage")) > 0;
      if (need_aux) {
        const clid::Signal e2 =
            clid::gaussian(r.length(), 1, cfg.sigma, cfg.base_seed + clid::kAuxSeedOffset);
        auxrec = clid::simulate(sys.plant, r, e2);
      }
      const clid::FreqGrid grid = clid::freq_grid(r.length());
      for (const std::string& method : methods) {
        const clid::MethodRun mr =
            clid::run_method(cfg, sys, method, r, rec, need_aux ? &auxrec : nullptr);
        auto f = open_out(out, method + ".txt");
        write_method_report(f, mr);
        const clid::ErrReport er = clid::err(sys.g0, mr.g_hat, grid);
        std::cout << method << ": err_mean " << er.err_mean << "%, stabilized "
                  << (mr.stabilized ? "yes" : "no") << ", report " << (out / (method + ".txt")).string()
                  << '\n';
      }
      return 0;
    }

    if (cmd_cmp->parsed()) {
      const std::vector<clid::TrialRecord> records = clid::run_compare(cfg);
      {
        auto f = open_out(out, "errors.csv");
        clid::write_errors_csv(records, f);
      }
      const std::vector<clid::MethodSummary> sums = clid::summarize(records);
      {
        auto f = open_out(out, "summary.csv");
        clid::write_summary_csv(sums, f);
      }
      print_summary_table(sums);
      std::cout << "wrote " << (out / "errors.csv").string() << ", "
                << (out / "summary.csv").string() << '\n';
      if (strict && !all_certified(records)) return 2;
      return 0;
    }

    if (cmd_swp->parsed()) {
      const std::vector<clid::TrialRecord> records = clid::run_sweep_n(cfg);
      {
        auto f = open_out(out, "errors.csv");
        clid::write_errors_csv(records, f);
      }
      {
        auto f = open_out(out, "sweep.csv");
        clid::write_sweep_csv(records, f);
      }
      std::cout << "wrote " << (out / "sweep.csv").string() << " ("
                << records.size() << " trials)\n";
      if (strict && !all_certified(records)) return 2;
      return 0;
    }

    if (cmd_bod->parsed()) {
      const clid::BodeRun br = clid::run_bode(cfg);
      {
        auto f = open_out(out, "bode_true.csv");
        clid::write_bode_csv(br.truth, f);
      }
      for (const auto& [name, table] : br.estimates) {
        auto f = open_out(out, "bode_" + name + ".csv");
        clid::write_bode_csv(table, f);
      }
      std::cout << "wrote " << (1 + br.estimates.size()) << " tables to " << out.string() << '\n';
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
