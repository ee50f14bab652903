#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ccdist/structure.hpp"

namespace ccdist {

struct FamilyMember {
  VectorFieldStructure f;
  VaryingNorm norm;
};

// Parameterized structures (f_lambda, N_lambda) with a designated limit.
// Parameters are reals; +inf is allowed (e.g. n -> infinity).
class StructureFamily {
 public:
  StructureFamily(std::string name, std::vector<double> params,
                  std::vector<FamilyMember> members, double limit_param,
                  bool limit_boundedly_compact);

  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }
  double limit_param() const { return limit_param_; }
  bool limit_boundedly_compact() const { return limit_boundedly_compact_; }
  int dim_m() const { return members_.front().f.dim_m(); }
  int dim_k() const { return members_.front().f.dim_k(); }

  bool contains(double lambda) const;
  // Throws NotAMember for parameters outside the family.
  const FamilyMember& member(double lambda) const;
  const FamilyMember& limit() const { return member(limit_param_); }

  // Non-limit parameters ordered so that later entries are closer to the
  // limit (|lambda - lambda0| decreasing, or lambda increasing when the limit
  // is +inf).
  std::vector<double> ordered_toward_limit() const;

 private:
  std::string name_;
  std::vector<double> params_;
  std::vector<FamilyMember> members_;
  double limit_param_;
  bool limit_boundedly_compact_;
};

std::string param_label(double lambda);

}  // namespace ccdist
