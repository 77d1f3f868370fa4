#pragma once

#include <deque>
#include <optional>
#include <string>
#include <variant>

namespace sappo {

/// Mean of the last n samples; during warm-up, the mean of what is available.
class MovingAverage {
 public:
  explicit MovingAverage(int window);

  double step(double x);
  void reset() { samples_.clear(); sum_ = 0.0; }
  int window() const { return window_; }

 private:
  int window_;
  std::deque<double> samples_;
  double sum_ = 0.0;
};

/// S(0) = Y(0); S(k) = alpha*Y(k) + (1 - alpha)*S(k-1).
class Ema {
 public:
  explicit Ema(double alpha);

  double step(double y);
  void reset() { state_.reset(); }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  std::optional<double> state_;
};

/// Scalar Kalman filter with a static process model.
class Kalman {
 public:
  /// `initial` seeds the estimate; without it the first measurement does.
  Kalman(double r, double q, double p0, std::optional<double> initial = std::nullopt);

  double step(double z);
  /// Restores the initial covariance and forgets the estimate.
  void reset();

  double estimate() const { return x_.value_or(0.0); }
  double covariance() const { return p_; }
  double last_gain() const { return gain_; }

 private:
  double r_;
  double q_;
  double p0_;
  std::optional<double> initial_;
  std::optional<double> x_;
  double p_;
  double gain_ = 0.0;
};

enum class FilterKind { none, moving_average, ema, kalman };

const char* to_string(FilterKind k);
FilterKind filter_kind_from_string(const std::string& s);

struct FilterConfig {
  FilterKind kind = FilterKind::none;
  int window = 10;
  double alpha = 0.2;
  double kalman_r = 7.35e-5;  // (8.575 mm)^2
  double kalman_q = 1e-6;
  double kalman_p0 = 1.0;

  void validate() const;
  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

/// One per-beacon distance stream filter.
class DistanceFilter {
 public:
  explicit DistanceFilter(const FilterConfig& cfg);

  double step(double x);
  void reset();
  FilterKind kind() const { return kind_; }

 private:
  struct Passthrough {
    double step(double x) { return x; }
    void reset() {}
  };
  FilterKind kind_;
  std::variant<Passthrough, MovingAverage, Ema, Kalman> state_;
};

}  // namespace sappo
