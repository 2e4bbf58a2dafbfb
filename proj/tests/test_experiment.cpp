#include <atomic>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "clid/experiment.hpp"
#include "doctest.h"

using namespace clid;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.order = 7;
  cfg.tau = 6;
  cfg.trials = 3;
  cfg.methods = {"diop", "dyp_zero", "dyp_two_stage"};
  cfg.base_seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("config text sets every section") {
  std::istringstream in(
      "# comment line\n"
      "[system]\n"
      "preset = benchmark\n"
      "feedback_sign = -1\n"
      "\n"
      "[excitation]\n"
      "order = 9        ; trailing comment\n"
      "amplitude = 2.0\n"
      "prbs_seed = 511\n"
      "[noise]\n"
      "sigma = 0.5\n"
      "base_seed = 4\n"
      "[identification]\n"
      "methods = diop dyp\n"
      "tau = 10\n"
      "dyp_gx = gc\n"
      "[runs]\n"
      "trials = 12\n"
      "orders = 6 7 8\n"
      "bode_points = 128\n"
      "bode_trials = 2\n"
      "[output]\n"
      "dir = results\n");
  const ExperimentConfig cfg = parse_config(in);
  CHECK(cfg.preset == "benchmark");
  CHECK(cfg.order == 9);
  CHECK(cfg.amplitude == 2.0);
  CHECK(cfg.prbs_seed == 511u);
  CHECK(cfg.sigma == 0.5);
  CHECK(cfg.base_seed == 4u);
  CHECK(cfg.tau == 10);
  CHECK(cfg.trials == 12);
  REQUIRE(cfg.orders.size() == 3);
  CHECK(cfg.orders[2] == 8);
  CHECK(cfg.bode_points == 128);
  CHECK(cfg.bode_trials == 2);
  CHECK(cfg.out_dir == "results");

  const auto methods = expand_methods(cfg);
  REQUIRE(methods.size() == 2);
  CHECK(methods[0] == "diop");
  CHECK(methods[1] == "dyp_gc");
}

TEST_CASE("config text with a custom system") {
  std::istringstream in(
      "[system]\n"
      "preset = custom\n"
      "g_num = 1\n"
      "g_den = 1 -0.5\n"
      "k_num = 0 0.3\n"
      "k_den = 1\n"
      "h_num = 1\n"
      "h_den = 1\n");
  const ExperimentConfig cfg = parse_config(in);
  const PreparedSystem sys = prepare_system(cfg);
  CHECK(sys.k_eff.scalar().num()[1] == doctest::Approx(-0.3));  // sign absorbed
  CHECK(sys.g0.scalar().den()[1] == doctest::Approx(-0.5));
  CHECK(sys.has_state_space);
}

TEST_CASE("config rejections") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  CHECK_THROWS_AS(parse("[system\npreset = benchmark\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[system]\njust words\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[system]\nunknown = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[noise]\nsigma = fast\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[system]\npreset = custom\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[system]\nfeedback_sign = 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[excitation]\norder = 1\n"), BadOrder);
  CHECK_THROWS_AS(parse("[identification]\ntau = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.ini"), std::invalid_argument);

  ExperimentConfig cfg;
  cfg.methods = {"diop", "mystery"};
  CHECK_THROWS_AS(expand_methods(cfg), std::invalid_argument);
  cfg.methods = {"diop", "diop"};
  CHECK_THROWS_AS(expand_methods(cfg), std::invalid_argument);
  cfg.methods = {};
  CHECK_THROWS_AS(expand_methods(cfg), std::invalid_argument);
}

TEST_CASE("benchmark preparation exposes the sign-absorbed controller") {
  const PreparedSystem sys = prepare_system(ExperimentConfig{});
  CHECK(sys.k_eff.scalar().num()[1] == doctest::Approx(-1.0));
  CHECK(sys.k_eff.scalar().num()[2] == doctest::Approx(0.8));
  CHECK(sys.has_state_space);
  CHECK(sys.k_ss.order() == 2);
}

TEST_CASE("per-method runs report their estimated parameters") {
  ExperimentConfig cfg = tiny_config();
  const PreparedSystem sys = prepare_system(cfg);
  PrbsSpec spec;
  spec.order = cfg.order;
  const Signal r = prbs(spec);
  const Signal e = gaussian(r.length(), 1, cfg.sigma, 1);
  const SimResult rec = simulate(sys.plant, r, e);
  const SimResult aux = simulate(sys.plant, r, gaussian(r.length(), 1, cfg.sigma, 2));

  const MethodRun diop = run_method(cfg, sys, "diop", r, rec, nullptr);
  REQUIRE(diop.params.size() == 4);
  CHECK(diop.params[0].first == "W");
  CHECK(diop.params[1].first == "X");
  CHECK(diop.params[3].first == "Z");

  const MethodRun dslp = run_method(cfg, sys, "dslp", r, rec, nullptr);
  REQUIRE(dslp.params.size() == 4);
  CHECK(dslp.params[0].first == "R");
  CHECK(dslp.params[3].first == "L");

  const MethodRun dyp = run_method(cfg, sys, "dyp_zero", r, rec, nullptr);
  REQUIRE(dyp.params.size() == 1);
  CHECK(dyp.params[0].first == "Q");
  CHECK(dyp.params[0].second.tau() == cfg.tau);

  const MethodRun staged = run_method(cfg, sys, "dyp_two_stage", r, rec, &aux);
  CHECK(staged.params.size() == 1);
  CHECK_THROWS_AS(run_method(cfg, sys, "dyp_two_stage", r, rec, nullptr),
                  std::invalid_argument);
}

TEST_CASE("comparison runs are deterministic apart from wall time") {
  const ExperimentConfig cfg = tiny_config();
  const auto a = run_compare(cfg);
  const auto b = run_compare(cfg);
  REQUIRE(a.size() == 9);  // three methods, three trials
  REQUIRE(b.size() == a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].trial == b[i].trial);
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].err_sum == b[i].err_sum);  // bitwise: same seeds, same order
    CHECK(a[i].err_mean == b[i].err_mean);
    CHECK(a[i].err_ratio == b[i].err_ratio);
    CHECK(a[i].stabilized == b[i].stabilized);
    CHECK(a[i].failed == b[i].failed);
  }

  // grouped by method with ascending trials and offset seeds
  CHECK(a[0].method == "diop");
  CHECK(a[3].method == "dyp_zero");
  CHECK(a[6].method == "dyp_two_stage");
  for (int t = 0; t < 3; ++t) {
    CHECK(a[static_cast<size_t>(t)].trial == t);
    CHECK(a[static_cast<size_t>(t)].seed == 9u + static_cast<unsigned>(t));
    CHECK(a[static_cast<size_t>(t)].n_samples == 127);
    CHECK(a[static_cast<size_t>(t)].tau == 6);
    CHECK_FALSE(a[static_cast<size_t>(t)].failed);
  }
}

TEST_CASE("record-length sweep concatenates per-order comparisons") {
  ExperimentConfig cfg = tiny_config();
  cfg.methods = {"diop"};
  cfg.trials = 2;
  cfg.orders = {6, 7};
  const auto records = run_sweep_n(cfg);
  REQUIRE(records.size() == 4);
  CHECK(records[0].n_samples == 63);
  CHECK(records[2].n_samples == 127);
  CHECK(records[1].trial == 1);

  std::ostringstream out;
  write_sweep_csv(records, out);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "method,d,N,mean_err_sum,median_err_sum,std_err_sum");
  std::string row;
  std::getline(lines, row);
  CHECK(row.rfind("diop,6,63,", 0) == 0);
}

TEST_CASE("summaries follow the boxplot conventions") {
  std::vector<TrialRecord> records;
  const double errs[] = {5.0, 1.0, 3.0, 2.0, 4.0};
  for (int i = 0; i < 5; ++i) {
    TrialRecord r;
    r.method = "m";
    r.trial = i;
    r.err_sum = errs[i];
    r.err_ratio = 2.0 * errs[i];
    r.stabilized = i < 3;
    records.push_back(r);
  }
  TrialRecord failed;
  failed.method = "m";
  failed.trial = 5;
  failed.failed = true;
  failed.err_sum = 1e9;  // must be ignored
  records.push_back(failed);

  const auto sums = summarize(records);
  REQUIRE(sums.size() == 1);
  const MethodSummary& s = sums[0];
  CHECK(s.count == 5);
  CHECK(s.failures == 1);
  CHECK(s.stabilized == 3);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.stddev == doctest::Approx(std::sqrt(2.5)));
  CHECK(s.median == doctest::Approx(3.0));
  CHECK(s.q1 == doctest::Approx(2.0));
  CHECK(s.q3 == doctest::Approx(4.0));
  CHECK(s.whisker_lo == doctest::Approx(1.0));
  CHECK(s.whisker_hi == doctest::Approx(5.0));
  CHECK(s.mean_err_ratio == doctest::Approx(6.0));

  // an outlier beyond 1.5 IQR stays outside the whiskers
  records[0].err_sum = 100.0;
  const auto sums2 = summarize(records);
  CHECK(sums2[0].whisker_hi == doctest::Approx(4.0));
}

TEST_CASE("error table format") {
  TrialRecord r;
  r.method = "diop";
  r.trial = 2;
  r.seed = 11;
  r.n_samples = 127;
  r.tau = 6;
  r.err_sum = 12.5;
  r.err_mean = 0.5;
  r.err_ratio = 0.25;
  r.stabilized = true;
  r.solve_time_s = 0.015625;
  std::ostringstream out;
  write_errors_csv({r}, out);
  std::istringstream lines(out.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "method,trial,seed,N,tau,err_sum,err_mean,err_ratio,stabilized,solve_time_s");
  CHECK(row == "diop,2,11,127,6,12.5,0.5,0.25,1,0.015625");

  std::ostringstream sum_out;
  write_summary_csv(summarize({r}), sum_out);
  std::string sum_header;
  std::istringstream sum_lines(sum_out.str());
  std::getline(sum_lines, sum_header);
  CHECK(sum_header ==
        "method,count,failures,stabilized,mean_err_sum,std_err_sum,median_err_sum,q1_err_sum,"
        "q3_err_sum,whisker_lo,whisker_hi,mean_err_ratio,mean_solve_time_s");
}

TEST_CASE("frequency-response runs cover truth and every estimate") {
  ExperimentConfig cfg = tiny_config();
  cfg.methods = {"dyp_zero"};
  cfg.bode_points = 16;
  cfg.bode_trials = 2;
  const BodeRun run = run_bode(cfg);
  CHECK(run.grid.size() == 16);
  CHECK(run.truth.mag_db.size() == 16);
  REQUIRE(run.estimates.size() == 2);
  CHECK(run.estimates[0].first == "dyp_zero_t0");
  CHECK(run.estimates[1].first == "dyp_zero_t1");

  std::ostringstream out;
  write_bode_csv(run.truth, out);
  std::string header;
  std::istringstream lines(out.str());
  std::getline(lines, header);
  CHECK(header == "omega,mag_db,phase_deg");
}

TEST_CASE("parallel loops visit every index and surface exceptions") {
  std::vector<int> hits(257, 0);
  parallel_for(257, [&](int i) { hits[static_cast<size_t>(i)] += 1; });
  for (int h : hits) CHECK(h == 1);

  std::atomic<int> calls{0};
  CHECK_THROWS_AS(parallel_for(64,
                               [&](int i) {
                                 calls.fetch_add(1);
                                 if (i == 13) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(calls.load() >= 1);

  CHECK(kAuxSeedOffset == 1000000u);
}
