#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace clid {

/// Multichannel real time series. Row k of data() holds the sample at time k,
/// one column per channel.
class Signal {
 public:
  Signal() : data_(0, 1) {}
  explicit Signal(Eigen::MatrixXd data) : data_(std::move(data)) {}

  static Signal zeros(int n, int dim = 1) {
    return Signal(Eigen::MatrixXd::Zero(n, dim));
  }
  /// Unit impulse at k = 0 on one channel.
  static Signal impulse(int n, int dim = 1, int channel = 0) {
    Signal s = zeros(n, dim);
    s.data_(0, channel) = 1.0;
    return s;
  }
  static Signal from_samples(const std::vector<double>& x) {
    Eigen::MatrixXd m(static_cast<int>(x.size()), 1);
    for (int k = 0; k < m.rows(); ++k) m(k, 0) = x[static_cast<size_t>(k)];
    return Signal(m);
  }

  int length() const { return static_cast<int>(data_.rows()); }
  int dim() const { return static_cast<int>(data_.cols()); }

  double operator()(int k, int ch = 0) const { return data_(k, ch); }
  double& at(int k, int ch = 0) { return data_(k, ch); }

  const Eigen::MatrixXd& data() const { return data_; }
  Eigen::MatrixXd& data() { return data_; }

  /// Sample at time k as a column vector.
  Eigen::VectorXd sample(int k) const { return data_.row(k).transpose(); }

 private:
  Eigen::MatrixXd data_;
};

Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);
Signal operator*(double c, const Signal& a);

/// Header "k, ch0, ch1, ..." then one row per sample.
void write_csv(const Signal& s, std::ostream& out);
Signal read_signal_csv(std::istream& in);

}  // namespace clid
