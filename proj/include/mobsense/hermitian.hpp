#pragma once

#include <complex>
#include <vector>

namespace mobsense {

using Complex = std::complex<double>;

/// Dense Hermitian matrix, row-major.
class HermitianOperator {
 public:
  static constexpr int kMaxDimension = 32;

  HermitianOperator() = default;
  /// Throws DomainError when ||H - H^dagger||_max > 1e-12 ||H||_max.
  HermitianOperator(int dimension, std::vector<Complex> entries);

  static HermitianOperator zero(int dimension);
  static HermitianOperator identity(int dimension);
  static HermitianOperator diagonal(const std::vector<double>& d);
  static HermitianOperator pauli_x();
  static HermitianOperator pauli_y();
  static HermitianOperator pauli_z();
  /// c0 I + cx X + cy Y + cz Z.
  static HermitianOperator from_pauli(double c0, double cx, double cy, double cz);

  int dimension() const noexcept { return dim_; }
  Complex operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * dim_ + j)]; }
  const std::vector<Complex>& entries() const noexcept { return a_; }
  double max_abs() const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  int dim_ = 0;
  std::vector<Complex> a_;
};

struct EigenRange {
  double min;
  double max;
  double gap() const noexcept { return max - min; }
};

/// Extreme eigenvalues. D = 2 in closed form, larger D by cyclic Jacobi.
EigenRange eigen_range(const HermitianOperator& h);

/// All eigenvalues (ascending) by cyclic complex Jacobi rotations, iterated
/// until the off-diagonal Frobenius norm is <= 1e-12 ||H||_F.
std::vector<double> jacobi_eigenvalues(const HermitianOperator& h);

}  // namespace mobsense
