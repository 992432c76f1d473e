#include "glab/beltrami_field.hpp"

#include <algorithm>
#include <cmath>

#include "glab/error.hpp"

namespace glab {

const DiskRule& default_disk_rule() {
  static const DiskRule rule = polar_rule(64, 256);
  return rule;
}

BeltramiField BeltramiField::from_function(PointFn f, Tag tag, std::optional<double> exact_sup) {
  if (!f) throw InvalidArgument("BeltramiField: empty evaluator");
  BeltramiField b;
  b.eval_ = std::move(f);
  b.tag_ = tag;
  const DiskRule& rule = default_disk_rule();
  b.grid_tag_ = rule.tag;
  b.samples_ = evaluate_batch(b.eval_, rule.nodes);
  b.finish(exact_sup);
  return b;
}

BeltramiField BeltramiField::from_samples(const DiskRule& rule, std::vector<cplx> samples, Tag tag,
                                          std::optional<double> exact_sup) {
  if (samples.size() != rule.size()) {
    throw InvalidArgument("BeltramiField: sample count does not match the rule");
  }
  BeltramiField b;
  b.tag_ = tag;
  b.grid_tag_ = rule.tag;
  b.samples_ = std::move(samples);
  b.finish(exact_sup);
  return b;
}

void BeltramiField::finish(std::optional<double> exact_sup) {
  grid_max_ = 0.0;
  for (const cplx& v : samples_) grid_max_ = std::max(grid_max_, std::abs(v));
  sup_ = exact_sup.value_or(grid_max_);
  if (!(sup_ < 1.0)) throw InvalidArgument("BeltramiField: sup norm must be below 1");
  if (!std::isfinite(grid_max_)) throw InvalidArgument("BeltramiField: non-finite samples");
}

cplx BeltramiField::operator()(cplx z) const {
  if (!eval_) throw InvalidArgument("BeltramiField: sample-only field has no pointwise evaluator");
  return eval_(z);
}

std::vector<cplx> BeltramiField::sample(const DiskRule& rule, Exec exec) const {
  if (rule.tag == grid_tag_ && rule.size() == samples_.size()) return samples_;
  if (!eval_) {
    throw InvalidArgument("grid mismatch: field sampled on " + grid_tag_ + ", requested " + rule.tag);
  }
  return evaluate_batch(eval_, rule.nodes, exec);
}

std::string to_string(BeltramiField::Tag tag) {
  switch (tag) {
    case BeltramiField::Tag::zero: return "zero";
    case BeltramiField::Tag::constant: return "constant";
    case BeltramiField::Tag::teichmuller: return "teichmuller";
    case BeltramiField::Tag::ahlfors_weill: return "ahlfors_weill";
    case BeltramiField::Tag::affine: return "affine";
    case BeltramiField::Tag::chain: return "chain";
    case BeltramiField::Tag::reflection: return "reflection";
    case BeltramiField::Tag::custom: return "custom";
  }
  return "custom";
}

}  // namespace glab
