#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobsense/fieldexpr.hpp"
#include "mobsense/hermitian.hpp"
#include "mobsense/quadrature.hpp"
#include "mobsense/trajectory.hpp"

namespace mobsense {

struct QfiReport {
  double bound = 0.0;
  std::vector<double> gap_samples;  // mu_max - mu_min at the grid nodes
  std::string method;               // "analytic-2x2", "jacobi" or "closed-form"
};

/// (integral of mu_max - mu_min)^2 from operators sampled at the grid nodes.
QfiReport qfi_bound(std::span<const HermitianOperator> samples, const QuadratureGrid& grid, bool parallel = true);
QfiReport qfi_bound(const std::function<HermitianOperator(double)>& generator, const QuadratureGrid& grid,
                    bool parallel = true);

/// Operator whose entries are field expressions; entry (i, j) = re + i im.
/// Only the upper triangle is read, the lower one is its conjugate.
class ExprOperator {
 public:
  ExprOperator(int dimension, std::vector<FieldExpr> re, std::vector<FieldExpr> im);

  /// c0 I + cx X + cy Y + cz Z.
  static ExprOperator pauli(FieldExpr c0, FieldExpr cx, FieldExpr cy, FieldExpr cz);

  int dimension() const noexcept { return dim_; }
  HermitianOperator at(std::span<const double> point, double t, const ParamMap& params) const;
  /// Entry-wise symbolic derivative.
  ExprOperator diff(std::string_view param) const;

 private:
  int dim_;
  std::vector<FieldExpr> re_, im_;
};

/// Samples of an expression operator along a path at the grid nodes.
std::vector<HermitianOperator> sample_operator(const ExprOperator& op, const Path& path, const QuadratureGrid& grid,
                                               const ParamMap& params = {});

/// B^2 v^2 T^4.
double qfi_spatial_frequency(double amplitude, double speed, double horizon);

/// 4 B^2 (sum_i w_i v_i t_i)^2.
double qfi_velocity_schedule(std::span<const double> velocity, double amplitude, const QuadratureGrid& grid);

/// B^2 T^4 (v0^2 + 4 v0 a T/3 + 4 a^2 T^2/9) for v(t) = v0 + a t.
double qfi_uniform_acceleration(double amplitude, double v0, double accel, double horizon);

/// 4 B^2 T^2 L^2, motion concentrated at the very end.
double qfi_fast_relocation(double amplitude, double horizon, double distance);

/// range^2 (integral of f o gamma)^2, or of d f/d param when `param` is given.
double qfi_moving_general(const FieldExpr& field, const Path& path, double spectral_range,
                          const QuadratureGrid& grid, const ParamMap& params = {},
                          const std::optional<std::string>& param = std::nullopt);

}  // namespace mobsense
