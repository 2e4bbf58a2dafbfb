#include "clid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace clid {

// ---------------------------------------------------------------------------
// config parsing

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for " + key);
}

double parse_double(const std::string& key, const std::string& value) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return v;
}

unsigned long long parse_uint(const std::string& key, const std::string& value) {
  size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return v;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(value)) out.push_back(parse_double(key, tok));
  if (out.empty()) bad_value(key, value);
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const std::string& tok : split_ws(value)) out.push_back(static_cast<int>(parse_int(key, tok)));
  if (out.empty()) bad_value(key, value);
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, std::vector<double>> polys;  // deferred rational coefficients
  std::string section, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;

    if (full == "system.preset") cfg.preset = value;
    else if (full == "system.feedback_sign") cfg.feedback_sign = static_cast<int>(parse_int(full, value));
    else if (full == "system.g_num" || full == "system.g_den" || full == "system.k_num" ||
             full == "system.k_den" || full == "system.h_num" || full == "system.h_den")
      polys[key] = parse_double_list(full, value);
    else if (full == "excitation.order") cfg.order = static_cast<int>(parse_int(full, value));
    else if (full == "excitation.amplitude") cfg.amplitude = parse_double(full, value);
    else if (full == "excitation.prbs_seed")
      cfg.prbs_seed = static_cast<std::uint32_t>(parse_uint(full, value));
    else if (full == "noise.sigma") cfg.sigma = parse_double(full, value);
    else if (full == "noise.base_seed") cfg.base_seed = parse_uint(full, value);
    else if (full == "identification.methods") cfg.methods = split_ws(value);
    else if (full == "identification.tau") cfg.tau = static_cast<int>(parse_int(full, value));
    else if (full == "identification.dyp_gx") cfg.dyp_gx = value;
    else if (full == "identification.gx_num" || full == "identification.gx_den")
      polys[key] = parse_double_list(full, value);
    else if (full == "runs.trials") cfg.trials = static_cast<int>(parse_int(full, value));
    else if (full == "runs.orders") cfg.orders = parse_int_list(full, value);
    else if (full == "runs.bode_points") cfg.bode_points = static_cast<int>(parse_int(full, value));
    else if (full == "runs.bode_trials") cfg.bode_trials = static_cast<int>(parse_int(full, value));
    else if (full == "output.dir") cfg.out_dir = value;
    else
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key " + full);
  }

  auto poly_or = [&](const char* key, std::vector<double> fallback) {
    auto it = polys.find(key);
    return Polynomial(it == polys.end() ? std::move(fallback) : it->second);
  };
  if (cfg.preset == "custom") {
    if (!polys.count("g_num") || !polys.count("g_den") || !polys.count("k_num") ||
        !polys.count("k_den"))
      throw std::invalid_argument("config: custom preset requires g_num/g_den and k_num/k_den");
    cfg.g = RationalTf(poly_or("g_num", {}), poly_or("g_den", {}));
    cfg.k = RationalTf(poly_or("k_num", {}), poly_or("k_den", {}));
    cfg.h = RationalTf(poly_or("h_num", {1.0}), poly_or("h_den", {1.0}));
  } else if (cfg.preset != "benchmark") {
    throw std::invalid_argument("config: unknown preset " + cfg.preset);
  }
  if (cfg.dyp_gx == "custom" || std::count(cfg.methods.begin(), cfg.methods.end(), "dyp_custom")) {
    if (!polys.count("gx_num") || !polys.count("gx_den"))
      throw std::invalid_argument("config: dyp_custom requires gx_num and gx_den");
    cfg.gx_custom = RationalTf(poly_or("gx_num", {}), poly_or("gx_den", {}));
  }

  if (cfg.feedback_sign != 1 && cfg.feedback_sign != -1)
    throw std::invalid_argument("config: feedback_sign must be +1 or -1");
  if (cfg.order < 2 || cfg.order > 16) throw BadOrder();
  for (int d : cfg.orders)
    if (d < 2 || d > 16) throw BadOrder();
  if (cfg.amplitude <= 0.0) throw std::invalid_argument("config: amplitude must be positive");
  if (cfg.sigma < 0.0) throw std::invalid_argument("config: sigma must be nonnegative");
  if (cfg.tau < 2) throw std::invalid_argument("config: tau must be at least 2");
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be positive");
  if (cfg.bode_points < 1) throw std::invalid_argument("config: bode_points must be positive");
  if (cfg.bode_trials < 0) throw std::invalid_argument("config: bode_trials must be nonnegative");
  expand_methods(cfg);  // validates method names
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// system preparation and method dispatch

PreparedSystem prepare_system(const ExperimentConfig& cfg) {
  PreparedSystem sys;
  RationalTf g, k, h;
  if (cfg.preset == "benchmark") {
    g = benchmark_g0();
    k = benchmark_k0();
    h = benchmark_h0();
  } else if (cfg.preset == "custom") {
    g = cfg.g;
    k = cfg.k;
    h = cfg.h;
  } else {
    throw std::invalid_argument("prepare_system: unknown preset " + cfg.preset);
  }
  sys.plant = make_siso_plant(g, k, h, cfg.feedback_sign);
  sys.k_eff = effective_controller(sys.plant);
  sys.g0 = TfMatrix::from_scalar(g);
  const RationalTf ke = sys.k_eff.scalar();
  const int deg = std::max(ke.num().trimmed().degree(), ke.den().trimmed().degree());
  if (deg >= 1) {
    sys.k_ss = controllable_canonical(ke);
    sys.has_state_space = true;
  }
  return sys;
}

std::vector<std::string> expand_methods(const ExperimentConfig& cfg) {
  static const char* known[] = {"diop", "dslp", "dyp_zero", "dyp_gc", "dyp_two_stage",
                                "dyp_custom"};
  if (cfg.methods.empty()) throw std::invalid_argument("config: methods must not be empty");
  std::vector<std::string> out;
  for (std::string name : cfg.methods) {
    if (name == "dyp") name = "dyp_" + cfg.dyp_gx;
    if (std::find(std::begin(known), std::end(known), name) == std::end(known))
      throw std::invalid_argument("config: unknown method " + name);
    if (std::count(out.begin(), out.end(), name))
      throw std::invalid_argument("config: duplicate method " + name);
    out.push_back(name);
  }
  return out;
}

MethodRun run_method(const ExperimentConfig& cfg, const PreparedSystem& sys,
                     const std::string& method, const Signal& r, const SimResult& rec,
                     const SimResult* aux) {
  MethodRun out;
  out.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  if (method == "diop") {
    DualIopSolution s = identify(rec.y, r, sys.k_eff, cfg.tau);
    out.g_hat = s.g_hat;
    out.diagnostics = s.diagnostics;
    out.params = {{"W", s.W}, {"X", s.X}, {"Y", s.Y}, {"Z", s.Z}};
  } else if (method == "dslp") {
    if (!sys.has_state_space)
      throw std::invalid_argument("dslp: controller has no dynamics to realize");
    DualSlpSolution s = identify_slp(rec.y, r, sys.k_ss, cfg.tau);
    out.g_hat = s.g_hat;
    out.diagnostics = s.diagnostics;
    out.params = {{"R", s.R}, {"N", s.N}, {"M", s.M}, {"L", s.L}};
  } else if (method.rfind("dyp_", 0) == 0) {
    const CoprimePair kf = trivial_factorization(sys.k_eff);
    DualYpSolution s;
    if (method == "dyp_two_stage") {
      if (!aux) throw std::invalid_argument("dyp_two_stage: auxiliary record missing");
      s = two_stage_gb(aux->y, aux->u, r, rec.y, rec.u, r, kf, cfg.tau);
    } else {
      CoprimePair gxf{TfMatrix::zero(1, 1), TfMatrix::identity(1)};
      if (method == "dyp_gc") gxf = trivial_factorization(TfMatrix::from_scalar(aux_plant_c()));
      else if (method == "dyp_custom")
        gxf = trivial_factorization(TfMatrix::from_scalar(cfg.gx_custom));
      else if (method != "dyp_zero")
        throw std::invalid_argument("unknown method " + method);
      s = identify_yp(rec.y, rec.u, r, kf, gxf, cfg.tau);
    }
    out.g_hat = s.g_hat;
    out.diagnostics = s.diagnostics;
    out.params = {{"Q", s.Q}};
  } else {
    throw std::invalid_argument("unknown method " + method);
  }
  out.solve_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    out.stabilized = internal_stability(out.g_hat, sys.k_eff);
  } catch (const std::exception&) {
    out.stabilized = false;  // certificate unavailable counts as not certified
  }
  return out;
}

// ---------------------------------------------------------------------------
// runners

std::vector<TrialRecord> run_compare(const ExperimentConfig& cfg) {
  const PreparedSystem sys = prepare_system(cfg);
  const std::vector<std::string> methods = expand_methods(cfg);
  const Signal r = prbs({cfg.order, cfg.amplitude, cfg.prbs_seed});
  const int N = r.length();
  const FreqGrid grid = freq_grid(N);
  const bool need_aux =
      std::count(methods.begin(), methods.end(), std::string("dyp_two_stage")) > 0;

  const int nm = static_cast<int>(methods.size());
  std::vector<TrialRecord> records(static_cast<size_t>(nm) * cfg.trials);
  parallel_for(cfg.trials, [&](int t) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(t);
    const Signal e = gaussian(N, 1, cfg.sigma, seed);
    const SimResult rec = simulate(sys.plant, r, e);
    SimResult auxrec;
    if (need_aux) {
      const Signal e2 = gaussian(N, 1, cfg.sigma, seed + kAuxSeedOffset);
      auxrec = simulate(sys.plant, r, e2);
    }
    for (int mi = 0; mi < nm; ++mi) {
      TrialRecord& row = records[static_cast<size_t>(mi) * cfg.trials + t];
      row.method = methods[static_cast<size_t>(mi)];
      row.trial = t;
      row.seed = seed;
      row.n_samples = N;
      row.tau = cfg.tau;
      try {
        const MethodRun mr =
            run_method(cfg, sys, row.method, r, rec, need_aux ? &auxrec : nullptr);
        const ErrReport er = err(sys.g0, mr.g_hat, grid);
        row.err_sum = er.err_sum;
        row.err_mean = er.err_mean;
        row.err_ratio = er.err_ratio;
        row.stabilized = mr.stabilized;
        row.solve_time_s = mr.solve_time_s;
      } catch (const std::exception& ex) {
        row.failed = true;
        row.failure = ex.what();
        row.err_sum = row.err_mean = row.err_ratio = std::numeric_limits<double>::quiet_NaN();
      }
    }
  });
  return records;
}

std::vector<TrialRecord> run_sweep_n(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> all;
  for (int d : cfg.orders) {
    ExperimentConfig sub = cfg;
    sub.order = d;
    std::vector<TrialRecord> part = run_compare(sub);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

BodeRun run_bode(const ExperimentConfig& cfg) {
  const PreparedSystem sys = prepare_system(cfg);
  const std::vector<std::string> methods = expand_methods(cfg);
  const Signal r = prbs({cfg.order, cfg.amplitude, cfg.prbs_seed});
  const int N = r.length();
  const bool need_aux =
      std::count(methods.begin(), methods.end(), std::string("dyp_two_stage")) > 0;

  BodeRun out;
  out.grid = freq_grid_points(cfg.bode_points);
  out.truth = bode_data(sys.g0, out.grid)[0];
  for (int t = 0; t < cfg.bode_trials; ++t) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(t);
    const Signal e = gaussian(N, 1, cfg.sigma, seed);
    const SimResult rec = simulate(sys.plant, r, e);
    SimResult auxrec;
    if (need_aux) {
      const Signal e2 = gaussian(N, 1, cfg.sigma, seed + kAuxSeedOffset);
      auxrec = simulate(sys.plant, r, e2);
    }
    for (const std::string& method : methods) {
      const MethodRun mr = run_method(cfg, sys, method, r, rec, need_aux ? &auxrec : nullptr);
      out.estimates.emplace_back(method + "_t" + std::to_string(t),
                                 bode_data(mr.g_hat, out.grid)[0]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// summaries and CSV output

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_time(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<MethodSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<MethodSummary> out;
  auto slot = [&](const std::string& method) -> MethodSummary& {
    for (auto& s : out)
      if (s.method == method) return s;
    out.push_back({});
    out.back().method = method;
    return out.back();
  };
  std::map<std::string, std::vector<double>> samples;
  for (const TrialRecord& r : records) {
    MethodSummary& s = slot(r.method);
    if (r.failed) {
      ++s.failures;
      continue;
    }
    ++s.count;
    if (r.stabilized) ++s.stabilized;
    s.mean += r.err_sum;
    s.mean_err_ratio += r.err_ratio;
    s.mean_time += r.solve_time_s;
    samples[r.method].push_back(r.err_sum);
  }
  for (auto& s : out) {
    std::vector<double>& v = samples[s.method];
    std::sort(v.begin(), v.end());
    if (s.count > 0) {
      s.mean /= s.count;
      s.mean_err_ratio /= s.count;
      s.mean_time /= s.count;
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.stddev = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
      s.median = quantile(v, 0.5);
      s.q1 = quantile(v, 0.25);
      s.q3 = quantile(v, 0.75);
      const double iqr = s.q3 - s.q1;
      const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
      s.whisker_lo = v.front();
      s.whisker_hi = v.back();
      for (double x : v)
        if (x >= lo_fence) {
          s.whisker_lo = x;
          break;
        }
      for (auto it = v.rbegin(); it != v.rend(); ++it)
        if (*it <= hi_fence) {
          s.whisker_hi = *it;
          break;
        }
    }
  }
  return out;
}

void write_errors_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << "method,trial,seed,N,tau,err_sum,err_mean,err_ratio,stabilized,solve_time_s\n";
  for (const TrialRecord& r : records)
    out << r.method << ',' << r.trial << ',' << r.seed << ',' << r.n_samples << ',' << r.tau << ','
        << fmt(r.err_sum) << ',' << fmt(r.err_mean) << ',' << fmt(r.err_ratio) << ','
        << (r.stabilized ? 1 : 0) << ',' << fmt_time(r.solve_time_s) << '\n';
}

void write_sweep_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << "method,d,N,mean_err_sum,median_err_sum,std_err_sum\n";
  std::vector<std::string> methods;
  for (const TrialRecord& r : records)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  for (const std::string& method : methods) {
    std::vector<int> lengths;
    for (const TrialRecord& r : records)
      if (r.method == method && std::find(lengths.begin(), lengths.end(), r.n_samples) ==
                                    lengths.end())
        lengths.push_back(r.n_samples);
    for (int n : lengths) {
      std::vector<double> v;
      for (const TrialRecord& r : records)
        if (r.method == method && r.n_samples == n && !r.failed) v.push_back(r.err_sum);
      std::sort(v.begin(), v.end());
      double mean = 0.0;
      for (double x : v) mean += x;
      if (!v.empty()) mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(ss / (static_cast<double>(v.size()) - 1.0)) : 0.0;
      const int d = static_cast<int>(std::lround(std::log2(static_cast<double>(n) + 1.0)));
      out << method << ',' << d << ',' << n << ',' << fmt(mean) << ',' << fmt(quantile(v, 0.5))
          << ',' << fmt(sd) << '\n';
    }
  }
}

void write_summary_csv(const std::vector<MethodSummary>& summaries, std::ostream& out) {
  out << "method,count,failures,stabilized,mean_err_sum,std_err_sum,median_err_sum,q1_err_sum,"
         "q3_err_sum,whisker_lo,whisker_hi,mean_err_ratio,mean_solve_time_s\n";
  for (const MethodSummary& s : summaries)
    out << s.method << ',' << s.count << ',' << s.failures << ',' << s.stabilized << ','
        << fmt(s.mean) << ',' << fmt(s.stddev) << ',' << fmt(s.median) << ',' << fmt(s.q1) << ','
        << fmt(s.q3) << ',' << fmt(s.whisker_lo) << ',' << fmt(s.whisker_hi) << ','
        << fmt(s.mean_err_ratio) << ',' << fmt_time(s.mean_time) << '\n';
}

void write_bode_csv(const BodeTable& table, std::ostream& out) {
  out << "omega,mag_db,phase_deg\n";
  for (size_t i = 0; i < table.omega.size(); ++i)
    out << fmt(table.omega[i]) << ',' << fmt(table.mag_db[i]) << ',' << fmt(table.phase_deg[i])
        << '\n';
}

// ---------------------------------------------------------------------------

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min(n, hw ? static_cast<int>(hw) : 1);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace clid
