#include "mobsense/qfi.hpp"

#include <cmath>

#include "mobsense/errors.hpp"
#include "mobsense/kernels.hpp"

namespace mobsense {

QfiReport qfi_bound(std::span<const HermitianOperator> samples, const QuadratureGrid& grid, bool parallel) {
  if (samples.size() != grid.size()) throw RangeError("operator sample count does not match the grid");
  QfiReport r;
  r.gap_samples.resize(samples.size());
  if (parallel) {
    kernels::spectral_gaps_parallel(samples, r.gap_samples);
  } else {
    kernels::spectral_gaps_serial(samples, r.gap_samples);
  }
  const double integral = grid.integrate(r.gap_samples);
  r.bound = integral * integral;
  bool all_two = true;
  for (const auto& h : samples) all_two = all_two && h.dimension() <= 2;
  r.method = all_two ? "analytic-2x2" : "jacobi";
  return r;
}

QfiReport qfi_bound(const std::function<HermitianOperator(double)>& generator, const QuadratureGrid& grid,
                    bool parallel) {
  std::vector<HermitianOperator> samples;
  samples.reserve(grid.size());
  for (double t : grid.nodes) samples.push_back(generator(t));
  return qfi_bound(samples, grid, parallel);
}

ExprOperator::ExprOperator(int dimension, std::vector<FieldExpr> re, std::vector<FieldExpr> im)
    : dim_(dimension), re_(std::move(re)), im_(std::move(im)) {
  if (dim_ < 1 || dim_ > HermitianOperator::kMaxDimension) throw RangeError("operator dimension out of range");
  const auto n = static_cast<std::size_t>(dim_ * dim_);
  if (re_.size() != n || im_.size() != n) throw RangeError("operator entry count mismatch");
}

ExprOperator ExprOperator::pauli(FieldExpr c0, FieldExpr cx, FieldExpr cy, FieldExpr cz) {
  return ExprOperator(2, {c0 + cz, cx, cx, c0 - cz}, {FieldExpr(), -cy, cy, FieldExpr()});
}

HermitianOperator ExprOperator::at(std::span<const double> point, double t, const ParamMap& params) const {
  std::vector<Complex> a(static_cast<std::size_t>(dim_ * dim_));
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      const auto k = static_cast<std::size_t>(i * dim_ + j);
      const double re = re_[k].eval(point, t, params);
      const double im = i == j ? 0.0 : im_[k].eval(point, t, params);
      a[k] = Complex(re, im);
      a[static_cast<std::size_t>(j * dim_ + i)] = Complex(re, -im);
    }
  }
  return HermitianOperator(dim_, std::move(a));
}

ExprOperator ExprOperator::diff(std::string_view param) const {
  std::vector<FieldExpr> re, im;
  for (const auto& e : re_) re.push_back(diff_param(e, param));
  for (const auto& e : im_) im.push_back(diff_param(e, param));
  return ExprOperator(dim_, std::move(re), std::move(im));
}

std::vector<HermitianOperator> sample_operator(const ExprOperator& op, const Path& path, const QuadratureGrid& grid,
                                               const ParamMap& params) {
  std::vector<HermitianOperator> out;
  out.reserve(grid.size());
  for (double t : grid.nodes) out.push_back(op.at(path.position_at(t), t, params));
  return out;
}

double qfi_spatial_frequency(double amplitude, double speed, double horizon) {
  if (horizon < 0.0) throw RangeError("horizon must be non-negative");
  return amplitude * amplitude * std::pow(horizon, 4) * (speed * speed);
}

double qfi_velocity_schedule(std::span<const double> velocity, double amplitude, const QuadratureGrid& grid) {
  if (velocity.size() != grid.size()) throw RangeError("velocity sample count does not match the grid");
  std::vector<double> vt(velocity.size());
  for (std::size_t i = 0; i < vt.size(); ++i) {
    if (!std::isfinite(velocity[i])) throw DomainError("velocity sample is not finite");
    vt[i] = velocity[i] * grid.nodes[i];
  }
  const double moment = grid.integrate(vt);
  return 4.0 * amplitude * amplitude * moment * moment;
}

double qfi_uniform_acceleration(double amplitude, double v0, double accel, double horizon) {
  const double T = horizon;
  return amplitude * amplitude * std::pow(T, 4) *
         (v0 * v0 + 4.0 * v0 * accel * T / 3.0 + 4.0 * accel * accel * T * T / 9.0);
}

double qfi_fast_relocation(double amplitude, double horizon, double distance) {
  if (distance < 0.0) throw RangeError("distance must be non-negative");
  return 4.0 * amplitude * amplitude * horizon * horizon * distance * distance;
}

double qfi_moving_general(const FieldExpr& field, const Path& path, double spectral_range,
                          const QuadratureGrid& grid, const ParamMap& params, const std::optional<std::string>& param) {
  if (!(spectral_range > 0.0)) throw RangeError("spectral range must be positive");
  const FieldExpr f = param ? diff_param(field, *param) : field;
  const double phase = grid.integrate(sample_composite(f, path, grid, params));
  return spectral_range * spectral_range * phase * phase;
}

}  // namespace mobsense
