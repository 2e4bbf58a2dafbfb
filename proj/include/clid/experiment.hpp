#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "clid/benchmark.hpp"
#include "clid/dual_iop.hpp"
#include "clid/dual_slp.hpp"
#include "clid/dual_yp.hpp"
#include "clid/metrics.hpp"
#include "clid/signals.hpp"
#include "clid/sim.hpp"

namespace clid {

/// Seed offset separating the auxiliary record of the two-experiment Youla
/// variant from the main record of the same trial.
inline constexpr std::uint64_t kAuxSeedOffset = 1000000;

/// Monte Carlo experiment description (INI-style config file, see
/// parse_config). Unset keys keep these defaults.
struct ExperimentConfig {
  // [system]
  std::string preset = "benchmark";  // "benchmark" or "custom"
  RationalTf g, k, h;                // used when preset = custom
  int feedback_sign = -1;
  // [excitation]
  int order = 14;  // PRBS register width; record length 2^order - 1
  double amplitude = 1.0;
  std::uint32_t prbs_seed = 0xFFFFu;
  // [noise]
  double sigma = 1.0;
  std::uint64_t base_seed = 1;  // trial t uses base_seed + t
  // [identification]
  std::vector<std::string> methods = {"diop", "dslp", "dyp_zero", "dyp_gc", "dyp_two_stage"};
  int tau = 14;
  std::string dyp_gx = "zero";  // expansion of a bare "dyp" entry
  RationalTf gx_custom;
  // [runs]
  int trials = 100;
  std::vector<int> orders = {8, 9, 10, 11, 12, 13, 14};  // sweep-n register widths
  int bode_points = 512;
  int bode_trials = 1;
  // [output]
  std::string out_dir = "out";
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

/// One method on one simulated record.
struct TrialRecord {
  std::string method;
  int trial = 0;
  std::uint64_t seed = 0;
  int n_samples = 0;
  int tau = 0;
  double err_sum = 0.0, err_mean = 0.0, err_ratio = 0.0;
  bool stabilized = false;
  double solve_time_s = 0.0;
  bool failed = false;
  std::string failure;
};

/// Boxplot-style statistics of err_sum per method, plus failure and
/// stability counts. Quartiles use linear interpolation between order
/// statistics; whiskers are the extreme samples within 1.5 IQR of the
/// quartiles.
struct MethodSummary {
  std::string method;
  int count = 0, failures = 0, stabilized = 0;
  double mean = 0.0, stddev = 0.0;
  double median = 0.0, q1 = 0.0, q3 = 0.0, whisker_lo = 0.0, whisker_hi = 0.0;
  double mean_err_ratio = 0.0, mean_time = 0.0;
};

struct PreparedSystem {
  ClosedLoopPlant plant;
  TfMatrix k_eff;  // sign-absorbed controller: the K every parameterization sees
  TfMatrix g0;
  bool has_state_space = false;
  StateSpace k_ss;  // controller realization for the system-level method
};
PreparedSystem prepare_system(const ExperimentConfig& cfg);

/// Expand config method names: "dyp" becomes "dyp_" + dyp_gx; explicit names
/// pass through. Throws std::invalid_argument on unknown names.
std::vector<std::string> expand_methods(const ExperimentConfig& cfg);

/// One identification run, with the estimated FIR parameters kept for export.
struct MethodRun {
  std::string method;
  TfMatrix g_hat;
  LsSolution diagnostics;
  std::vector<std::pair<std::string, FirSeq>> params;
  double solve_time_s = 0.0;
  bool stabilized = false;
};
/// aux may be null unless method == "dyp_two_stage".
MethodRun run_method(const ExperimentConfig& cfg, const PreparedSystem& sys,
                     const std::string& method, const Signal& r, const SimResult& rec,
                     const SimResult* aux);

/// Full Monte Carlo comparison: one PRBS realization, cfg.trials independent
/// noise draws (seed base_seed + t), every expanded method on each. Records
/// are grouped by method, trials ascending; trials run concurrently but land
/// in preassigned slots, so the output is deterministic. Method failures are
/// recorded per trial, not raised.
std::vector<TrialRecord> run_compare(const ExperimentConfig& cfg);

/// run_compare for each register width in cfg.orders, concatenated.
std::vector<TrialRecord> run_sweep_n(const ExperimentConfig& cfg);

/// Frequency responses of the true plant and of re-identified estimates
/// (bode_trials noise draws per method) on a bode_points grid.
struct BodeRun {
  FreqGrid grid;
  BodeTable truth;  // first entry of the true plant
  std::vector<std::pair<std::string, BodeTable>> estimates;  // name "method_t<trial>"
};
BodeRun run_bode(const ExperimentConfig& cfg);

std::vector<MethodSummary> summarize(const std::vector<TrialRecord>& records);

/// method,trial,seed,N,tau,err_sum,err_mean,err_ratio,stabilized,solve_time_s
void write_errors_csv(const std::vector<TrialRecord>& records, std::ostream& out);
/// method,d,N,mean_err_sum,median_err_sum,std_err_sum  (failures excluded)
void write_sweep_csv(const std::vector<TrialRecord>& records, std::ostream& out);
void write_summary_csv(const std::vector<MethodSummary>& summaries, std::ostream& out);
/// omega,mag_db,phase_deg
void write_bode_csv(const BodeTable& table, std::ostream& out);

/// Run fn(0..n-1) across hardware threads; rethrows the first exception.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace clid
