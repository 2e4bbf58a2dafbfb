#include "clid/signals.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "clid/lti.hpp"

namespace clid {

namespace {

// Feedback masks (bit i taps state bit i) giving maximal period under
//   out = state & 1,  fb = parity(state & mask),  state = (state >> 1) | (fb << (d-1)).
// Indexed by order d = 2..16; every entry is verified full-period by test.
constexpr std::uint32_t kFeedbackMask[17] = {
    0,      0,      0x3,    0x5,    0x9,    0x17,  0x21,   0x41,  0x87,
    0x113,  0x213,  0x40b,  0xc05,  0x1007, 0x200d, 0x4001, 0x8013,
};

std::uint32_t lfsr_step(std::uint32_t s, int d) {
  const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(s & kFeedbackMask[d]) & 1);
  return (s >> 1) | (fb << (d - 1));
}

}  // namespace

Signal prbs(const PrbsSpec& spec) {
  if (spec.order < 2 || spec.order > 16) throw BadOrder{};
  const std::uint32_t mask = (1u << spec.order) - 1u;
  std::uint32_t s = spec.seed & mask;
  if (s == 0) throw ZeroSeed{};
  const int n = static_cast<int>(mask);
  Signal out = Signal::zeros(n, 1);
  for (int k = 0; k < n; ++k) {
    out.at(k) = (s & 1u) ? spec.amplitude : -spec.amplitude;
    s = lfsr_step(s, spec.order);
  }
  return out;
}

int lfsr_period(int order) {
  if (order < 2 || order > 16) throw BadOrder{};
  const std::uint32_t s0 = (1u << order) - 1u;
  std::uint32_t s = s0;
  int n = 0;
  do {
    s = lfsr_step(s, order);
    ++n;
  } while (s != s0 && n <= static_cast<int>(1u << order));
  return n;
}

Signal gaussian(int n, int dim, double sigma, std::uint64_t seed) {
  if (n < 0 || dim <= 0) throw DimensionMismatch("gaussian: bad shape");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;  // in (0, 1)
  };
  Signal out = Signal::zeros(n, dim);
  bool have_spare = false;
  double spare = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int ch = 0; ch < dim; ++ch) {
      double v;
      if (have_spare) {
        v = spare;
        have_spare = false;
      } else {
        const double u1 = uniform(), u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        v = rad * std::cos(2.0 * M_PI * u2);
        spare = rad * std::sin(2.0 * M_PI * u2);
        have_spare = true;
      }
      out.at(k, ch) = sigma * v;
    }
  }
  return out;
}

// ============================================================================
// Signal arithmetic and CSV form
// ============================================================================

namespace {

void check_same_shape(const Signal& a, const Signal& b) {
  if (a.length() != b.length() || a.dim() != b.dim())
    throw DimensionMismatch("signal shapes differ");
}

}  // namespace

Signal operator+(const Signal& a, const Signal& b) {
  check_same_shape(a, b);
  return Signal(a.data() + b.data());
}

Signal operator-(const Signal& a, const Signal& b) {
  check_same_shape(a, b);
  return Signal(a.data() - b.data());
}

Signal operator*(double c, const Signal& a) { return Signal(c * a.data()); }

void write_csv(const Signal& s, std::ostream& out) {
  out << "k";
  for (int ch = 0; ch < s.dim(); ++ch) out << ", ch" << ch;
  out << "\n";
  char buf[64];
  for (int k = 0; k < s.length(); ++k) {
    out << k;
    for (int ch = 0; ch < s.dim(); ++ch) {
      std::snprintf(buf, sizeof buf, ", %.17g", s(k, ch));
      out << buf;
    }
    out << "\n";
  }
}

Signal read_signal_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty signal file");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    double k;
    ls >> k;
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  const int dim = n > 0 ? static_cast<int>(rows[0].size()) : 1;
  Signal s = Signal::zeros(n, dim);
  for (int k = 0; k < n; ++k) {
    if (static_cast<int>(rows[static_cast<size_t>(k)].size()) != dim)
      throw std::invalid_argument("ragged signal rows");
    for (int ch = 0; ch < dim; ++ch) s.at(k, ch) = rows[static_cast<size_t>(k)][static_cast<size_t>(ch)];
  }
  return s;
}

}  // namespace clid
