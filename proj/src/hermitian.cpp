#include "mobsense/hermitian.hpp"

#include <algorithm>
#include <cmath>

#include "mobsense/errors.hpp"

namespace mobsense {

HermitianOperator::HermitianOperator(int dimension, std::vector<Complex> entries)
    : dim_(dimension), a_(std::move(entries)) {
  if (dim_ < 1) throw RangeError("operator dimension must be positive");
  if (dim_ > kMaxDimension) throw RangeError("operator dimension exceeds " + std::to_string(kMaxDimension));
  if (a_.size() != static_cast<std::size_t>(dim_ * dim_)) throw RangeError("operator entry count mismatch");
  const double scale = max_abs();
  double asym = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) asym = std::max(asym, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  }
  if (asym > 1e-12 * scale) throw DomainError("operator is not Hermitian");
}

HermitianOperator HermitianOperator::zero(int dimension) {
  return HermitianOperator(dimension, std::vector<Complex>(static_cast<std::size_t>(dimension * dimension)));
}

HermitianOperator HermitianOperator::identity(int dimension) {
  std::vector<Complex> a(static_cast<std::size_t>(dimension * dimension));
  for (int i = 0; i < dimension; ++i) a[static_cast<std::size_t>(i * dimension + i)] = 1.0;
  return HermitianOperator(dimension, std::move(a));
}

HermitianOperator HermitianOperator::diagonal(const std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  std::vector<Complex> a(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] = d[static_cast<std::size_t>(i)];
  return HermitianOperator(n, std::move(a));
}

HermitianOperator HermitianOperator::pauli_x() { return from_pauli(0, 1, 0, 0); }
HermitianOperator HermitianOperator::pauli_y() { return from_pauli(0, 0, 1, 0); }
HermitianOperator HermitianOperator::pauli_z() { return from_pauli(0, 0, 0, 1); }

HermitianOperator HermitianOperator::from_pauli(double c0, double cx, double cy, double cz) {
  return HermitianOperator(2, {Complex(c0 + cz, 0.0), Complex(cx, -cy), Complex(cx, cy), Complex(c0 - cz, 0.0)});
}

double HermitianOperator::max_abs() const {
  double m = 0.0;
  for (const auto& z : a_) m = std::max(m, std::abs(z));
  return m;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (o.dim_ != dim_) throw RangeError("operator dimensions differ");
  std::vector<Complex> a(a_);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a_[i];
  return HermitianOperator(dim_, std::move(a));
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const { return *this + o * -1.0; }

HermitianOperator HermitianOperator::operator*(double s) const {
  std::vector<Complex> a(a_);
  for (auto& z : a) z *= s;
  return HermitianOperator(dim_, std::move(a));
}

std::vector<double> jacobi_eigenvalues(const HermitianOperator& h) {
  const int n = h.dimension();
  std::vector<Complex> a = h.entries();
  auto at = [&a, n](int i, int j) -> Complex& { return a[static_cast<std::size_t>(i * n + j)]; };

  double frob = 0.0;
  for (const auto& z : a) frob += std::norm(z);
  frob = std::sqrt(frob);
  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += std::norm(at(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && frob > 0.0 && off_norm() > 1e-12 * frob; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex apq = at(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const Complex phase = std::conj(apq) / r;  // e^{-i phi}
        const double app = at(p, p).real(), aqq = at(q, q).real();
        const double theta = 0.5 * std::atan2(-2.0 * r, app - aqq);
        const double c = std::cos(theta), s = std::sin(theta);
        const Complex upp = c, upq = s, uqp = -s * phase, uqq = c * phase;
        for (int k = 0; k < n; ++k) {
          const Complex akp = at(k, p), akq = at(k, q);
          at(k, p) = akp * upp + akq * uqp;
          at(k, q) = akp * upq + akq * uqq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex apk = at(p, k), aqk = at(q, k);
          at(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          at(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        at(p, p) = at(p, p).real();
        at(q, q) = at(q, q).real();
      }
    }
  }

  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

EigenRange eigen_range(const HermitianOperator& h) {
  if (h.dimension() == 1) return {h(0, 0).real(), h(0, 0).real()};
  if (h.dimension() == 2) {
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
    return {mean - radius, mean + radius};
  }
  const auto ev = jacobi_eigenvalues(h);
  return {ev.front(), ev.back()};
}

}  // namespace mobsense
