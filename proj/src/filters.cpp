#include "sappo/filters.hpp"

#include "sappo/error.hpp"

namespace sappo {

MovingAverage::MovingAverage(int window) : window_(window) {
  if (window < 1) throw Error(ErrorCode::domain, "moving-average window must be >= 1");
}

double MovingAverage::step(double x) {
  samples_.push_back(x);
  sum_ += x;
  if (static_cast<int>(samples_.size()) > window_) {
    sum_ -= samples_.front();
    samples_.pop_front();
  }
  return sum_ / static_cast<double>(samples_.size());
}

Ema::Ema(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::domain, "EMA alpha must lie in (0, 1]");
}

double Ema::step(double y) {
  state_ = state_ ? alpha_ * y + (1.0 - alpha_) * *state_ : y;
  return *state_;
}

Kalman::Kalman(double r, double q, double p0, std::optional<double> initial)
    : r_(r), q_(q), p0_(p0), initial_(initial), x_(initial), p_(p0) {
  if (!(r > 0.0)) throw Error(ErrorCode::domain, "Kalman r must be positive");
  if (!(q >= 0.0)) throw Error(ErrorCode::domain, "Kalman q must be non-negative");
  if (!(p0 >= 0.0)) throw Error(ErrorCode::domain, "Kalman P0 must be non-negative");
}

double Kalman::step(double z) {
  if (!x_) x_ = z;
  gain_ = p_ / (p_ + r_);
  *x_ = *x_ + gain_ * (z - *x_);
  p_ = (1.0 - gain_) * p_;
  // Static model: the prediction keeps the estimate and only inflates P.
  p_ += q_;
  return *x_;
}

void Kalman::reset() {
  x_ = initial_;
  p_ = p0_;
  gain_ = 0.0;
}

const char* to_string(FilterKind k) {
  switch (k) {
    case FilterKind::none: return "none";
    case FilterKind::moving_average: return "moving_average";
    case FilterKind::ema: return "ema";
    case FilterKind::kalman: return "kalman";
  }
  return "none";
}

FilterKind filter_kind_from_string(const std::string& s) {
  if (s == "none") return FilterKind::none;
  if (s == "moving_average") return FilterKind::moving_average;
  if (s == "ema") return FilterKind::ema;
  if (s == "kalman") return FilterKind::kalman;
  throw Error(ErrorCode::schema, "unknown filter kind '" + s + "'");
}

void FilterConfig::validate() const {
  if (window < 1) throw Error(ErrorCode::domain, "filter window must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::domain, "filter alpha must lie in (0, 1]");
  if (!(kalman_r > 0.0 && kalman_q >= 0.0 && kalman_p0 >= 0.0)) {
    throw Error(ErrorCode::domain, "Kalman parameters need r > 0, q >= 0, P0 >= 0");
  }
}

DistanceFilter::DistanceFilter(const FilterConfig& cfg) : kind_(cfg.kind) {
  switch (cfg.kind) {
    case FilterKind::none: state_ = Passthrough{}; break;
    case FilterKind::moving_average: state_ = MovingAverage(cfg.window); break;
    case FilterKind::ema: state_ = Ema(cfg.alpha); break;
    case FilterKind::kalman: state_ = Kalman(cfg.kalman_r, cfg.kalman_q, cfg.kalman_p0); break;
  }
}

double DistanceFilter::step(double x) {
  return std::visit([x](auto& f) { return f.step(x); }, state_);
}

void DistanceFilter::reset() {
  std::visit([](auto& f) { f.reset(); }, state_);
}

}  // namespace sappo
