#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glab/kernels.hpp"
#include "glab/quadrature.hpp"

namespace glab {

// The 64 x 256 polar rule every field is sampled on by default.
const DiskRule& default_disk_rule();

// A Beltrami coefficient on the unit disk with sup norm < 1.
//
// Closed-form fields keep their evaluator and can be paired on any rule;
// sample-only fields (e.g. from a numerical extension) pair only on the rule
// they were sampled on.
class BeltramiField {
 public:
  enum class Tag { zero, constant, teichmuller, ahlfors_weill, affine, chain, reflection, custom };

  // Samples f on the default rule. sup_norm is exact_sup when given,
  // otherwise the grid maximum.
  static BeltramiField from_function(PointFn f, Tag tag, std::optional<double> exact_sup = {});
  static BeltramiField from_samples(const DiskRule& rule, std::vector<cplx> samples, Tag tag,
                                    std::optional<double> exact_sup = {});

  bool has_evaluator() const noexcept { return static_cast<bool>(eval_); }
  cplx operator()(cplx z) const;
  // Values at rule's nodes; throws InvalidArgument on a grid mismatch.
  std::vector<cplx> sample(const DiskRule& rule, Exec exec = Exec::parallel) const;

  double sup_norm() const noexcept { return sup_; }
  double grid_max() const noexcept { return grid_max_; }
  Tag tag() const noexcept { return tag_; }
  const std::string& grid_tag() const noexcept { return grid_tag_; }
  std::span<const cplx> samples() const noexcept { return samples_; }

 private:
  BeltramiField() = default;
  void finish(std::optional<double> exact_sup);

  PointFn eval_;
  std::string grid_tag_;
  std::vector<cplx> samples_;
  double sup_ = 0.0;
  double grid_max_ = 0.0;
  Tag tag_ = Tag::custom;
};

std::string to_string(BeltramiField::Tag tag);

}  // namespace glab
