#include "ccdist/family.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccdist/errors.hpp"

namespace ccdist {

StructureFamily::StructureFamily(std::string name, std::vector<double> params,
                                 std::vector<FamilyMember> members,
                                 double limit_param, bool limit_boundedly_compact)
    : name_(std::move(name)),
      params_(std::move(params)),
      members_(std::move(members)),
      limit_param_(limit_param),
      limit_boundedly_compact_(limit_boundedly_compact) {
  if (params_.empty() || params_.size() != members_.size()) {
    throw InvalidArgument("family needs one member per parameter");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (std::isnan(params_[i])) throw InvalidArgument("family parameter is NaN");
    for (std::size_t j = 0; j < i; ++j) {
      if (params_[i] == params_[j]) {
        throw InvalidArgument("duplicate family parameter " + param_label(params_[i]));
      }
    }
  }
  if (!contains(limit_param_)) {
    throw InvalidArgument("limit parameter " + param_label(limit_param_) +
                          " is not in the family");
  }
  const int m = members_.front().f.dim_m();
  const int k = members_.front().f.dim_k();
  for (const auto& member : members_) {
    if (member.f.dim_m() != m || member.f.dim_k() != k || member.norm.dim_k() != k) {
      throw DimensionMismatch("family members disagree in dimensions");
    }
  }
}

bool StructureFamily::contains(double lambda) const {
  return std::find(params_.begin(), params_.end(), lambda) != params_.end();
}

const FamilyMember& StructureFamily::member(double lambda) const {
  const auto it = std::find(params_.begin(), params_.end(), lambda);
  if (it == params_.end()) {
    throw NotAMember("parameter " + param_label(lambda) + " is not a member of family " +
                     name_);
  }
  return members_[static_cast<std::size_t>(it - params_.begin())];
}

std::vector<double> StructureFamily::ordered_toward_limit() const {
  std::vector<double> out;
  for (double p : params_) {
    if (p != limit_param_) out.push_back(p);
  }
  if (std::isinf(limit_param_)) {
    const bool up = limit_param_ > 0;
    std::stable_sort(out.begin(), out.end(),
                     [up](double a, double b) { return up ? a < b : a > b; });
  } else {
    const double l0 = limit_param_;
    std::stable_sort(out.begin(), out.end(), [l0](double a, double b) {
      return std::abs(a - l0) > std::abs(b - l0);
    });
  }
  return out;
}

std::string param_label(double lambda) {
  if (std::isinf(lambda)) return lambda > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(17);
  out << lambda;
  return out.str();
}

}  // namespace ccdist
