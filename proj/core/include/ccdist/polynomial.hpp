#pragma once

#include <vector>

#include "ccdist/structure.hpp"

namespace ccdist {

struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;  // one per coordinate
};

// Entry (row, col) of A(p) as a sum of monomials in the coordinates of p.
// Evaluation and the analytic control Jacobian are exact.
class PolynomialFrame {
 public:
  PolynomialFrame(int dim_m, int dim_k);

  void add_term(int row, int col, Monomial term);
  const std::vector<Monomial>& entry(int row, int col) const;

  int dim_m() const { return dim_m_; }
  int dim_k() const { return dim_k_; }

  Mat evaluate(const Vec& p) const;
  Mat control_jacobian(const Vec& p, const Vec& u) const;

  VectorFieldStructure to_structure(std::string name = "polynomial") const;

 private:
  int dim_m_;
  int dim_k_;
  std::vector<std::vector<Monomial>> entries_;  // row-major m*k
};

}  // namespace ccdist
