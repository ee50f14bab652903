#include "ccdist/polynomial.hpp"

#include <cmath>
#include <memory>

#include "ccdist/errors.hpp"

namespace ccdist {

namespace {

double monomial_value(const Monomial& term, const Vec& p) {
  double v = term.coefficient;
  for (std::size_t i = 0; i < term.exponents.size(); ++i) {
    const int e = term.exponents[i];
    for (int r = 0; r < e; ++r) v *= p(static_cast<Eigen::Index>(i));
  }
  return v;
}

// d/dp_c of the monomial.
double monomial_partial(const Monomial& term, const Vec& p, std::size_t c) {
  const int ec = term.exponents[c];
  if (ec == 0) return 0.0;
  double v = term.coefficient * ec;
  for (std::size_t i = 0; i < term.exponents.size(); ++i) {
    const int e = i == c ? ec - 1 : term.exponents[i];
    for (int r = 0; r < e; ++r) v *= p(static_cast<Eigen::Index>(i));
  }
  return v;
}

}  // namespace

PolynomialFrame::PolynomialFrame(int dim_m, int dim_k)
    : dim_m_(dim_m), dim_k_(dim_k),
      entries_(static_cast<std::size_t>(dim_m) * static_cast<std::size_t>(dim_k)) {
  if (dim_m < 1 || dim_k < 1 || dim_m > kMaxDim || dim_k > kMaxDim) {
    throw InvalidArgument("polynomial frame dimensions out of range");
  }
}

void PolynomialFrame::add_term(int row, int col, Monomial term) {
  if (row < 0 || row >= dim_m_ || col < 0 || col >= dim_k_) {
    throw InvalidArgument("polynomial entry index out of range");
  }
  if (term.exponents.empty()) term.exponents.assign(static_cast<std::size_t>(dim_m_), 0);
  if (static_cast<int>(term.exponents.size()) != dim_m_) {
    throw DimensionMismatch("monomial needs one exponent per coordinate");
  }
  for (int e : term.exponents) {
    if (e < 0) throw InvalidArgument("monomial exponents must be nonnegative");
  }
  if (!std::isfinite(term.coefficient)) throw InvalidArgument("monomial coefficient must be finite");
  entries_[static_cast<std::size_t>(row * dim_k_ + col)].push_back(std::move(term));
}

const std::vector<Monomial>& PolynomialFrame::entry(int row, int col) const {
  return entries_.at(static_cast<std::size_t>(row * dim_k_ + col));
}

Mat PolynomialFrame::evaluate(const Vec& p) const {
  Mat a = Mat::Zero(dim_m_, dim_k_);
  for (int r = 0; r < dim_m_; ++r) {
    for (int c = 0; c < dim_k_; ++c) {
      double v = 0.0;
      for (const auto& term : entry(r, c)) v += monomial_value(term, p);
      a(r, c) = v;
    }
  }
  return a;
}

Mat PolynomialFrame::control_jacobian(const Vec& p, const Vec& u) const {
  Mat jac = Mat::Zero(dim_m_, dim_m_);
  for (int r = 0; r < dim_m_; ++r) {
    for (int c = 0; c < dim_k_; ++c) {
      for (const auto& term : entry(r, c)) {
        for (int d = 0; d < dim_m_; ++d) {
          jac(r, d) += monomial_partial(term, p, static_cast<std::size_t>(d)) * u(c);
        }
      }
    }
  }
  return jac;
}

VectorFieldStructure PolynomialFrame::to_structure(std::string name) const {
  auto self = std::make_shared<const PolynomialFrame>(*this);
  VectorFieldStructure::Options options;
  options.name = std::move(name);
  options.smooth = true;
  options.jacobian = [self](const Vec& p, const Vec& u) { return self->control_jacobian(p, u); };
  return VectorFieldStructure(dim_m_, dim_k_,
                              [self](const Vec& p) { return self->evaluate(p); },
                              std::move(options));
}

}  // namespace ccdist
