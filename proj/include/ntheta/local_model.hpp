#pragma once

// The standard nodal local ring
//
//   O_std = (tensor_i k[[u_i, v_i]] / (u_i v_i)) tensor (tensor_j k[[w_j]])
//
// with canonical coordinates u1..un, v1..vn, w1..wm, and its normalization:
// 2^n power series rings, one per choice of surviving coordinate at each node.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ntheta/errors.hpp"
#include "ntheta/power_series.hpp"

namespace ntheta {

class LocalModel {
public:
  LocalModel(int nodes, int smooth) : nodes_(nodes), smooth_(smooth) {
    detail::require(nodes >= 0 && smooth >= 0, "negative-model-size", "n and m must be >= 0");
    detail::require(2 * nodes + smooth >= 1, "empty-model", "need 2n + m >= 1");
    detail::require(2 * nodes + smooth <= static_cast<int>(kMaxVariables), "too-many-variables",
                    "need 2n + m <= " + std::to_string(kMaxVariables));
  }

  int nodes() const noexcept { return nodes_; }
  int smooth() const noexcept { return smooth_; }
  int dimension() const noexcept { return nodes_ + smooth_; }
  std::size_t variable_count() const noexcept { return static_cast<std::size_t>(2 * nodes_ + smooth_); }

  std::size_t u(int i) const noexcept { return static_cast<std::size_t>(i); }
  std::size_t v(int i) const noexcept { return static_cast<std::size_t>(nodes_ + i); }
  std::size_t w(int j) const noexcept { return static_cast<std::size_t>(2 * nodes_ + j); }

  /// u1..un, v1..vn, w1..wm (1-based names, 0-based accessors).
  std::vector<std::string> variables() const {
    std::vector<std::string> names;
    for (int i = 1; i <= nodes_; ++i) names.push_back("u" + std::to_string(i));
    for (int i = 1; i <= nodes_; ++i) names.push_back("v" + std::to_string(i));
    for (int j = 1; j <= smooth_; ++j) names.push_back("w" + std::to_string(j));
    return names;
  }

  /// Mask selecting the node coordinates; Z is where all of them vanish.
  std::vector<bool> node_mask() const {
    std::vector<bool> mask(variable_count(), false);
    for (int i = 0; i < 2 * nodes_; ++i) mask[static_cast<std::size_t>(i)] = true;
    return mask;
  }

  friend bool operator==(const LocalModel&, const LocalModel&) = default;

private:
  int nodes_;
  int smooth_;
};

/// An element of O_std in normal form: no monomial divisible by u_i v_i.
class ModelElement {
public:
  const LocalModel& model() const noexcept { return model_; }
  const PowerSeries& series() const noexcept { return series_; }
  bool is_zero() const noexcept { return series_.is_zero(); }

  friend bool operator==(const ModelElement&, const ModelElement&) = default;

private:
  ModelElement(LocalModel model, PowerSeries series) : model_(std::move(model)), series_(std::move(series)) {}
  friend ModelElement reduce(const LocalModel&, const PowerSeries&);

  LocalModel model_;
  PowerSeries series_;
};

/// Unique normal-form representative of f modulo the relations u_i v_i.
inline ModelElement reduce(const LocalModel& model, const PowerSeries& f) {
  detail::require(f.variables() == model.variables(), "variable-mismatch",
                  "series must be over the model variables u1..un, v1..vn, w1..wm");
  PowerSeries out(f.variables(), f.truncation());
  for (const auto& [e, c] : f.terms()) {
    bool killed = false;
    for (int i = 0; i < model.nodes() && !killed; ++i) killed = e[model.u(i)] > 0 && e[model.v(i)] > 0;
    if (!killed) out.add_term(e, c);
  }
  return ModelElement(model, std::move(out));
}

enum class BranchSide { keep_u, keep_v };

struct BranchIndex {
  std::vector<BranchSide> choice;

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < choice.size(); ++i) {
      if (i) out += ",";
      out += choice[i] == BranchSide::keep_u ? "keep-u" : "keep-v";
    }
    return out.empty() ? "smooth" : out;
  }

  friend bool operator==(const BranchIndex&, const BranchIndex&) = default;
};

/// Canonical order: branch b keeps v_i exactly when bit i of b is set.
inline std::vector<BranchIndex> enumerate_branches(const LocalModel& model) {
  std::vector<BranchIndex> out;
  const std::size_t count = std::size_t{1} << model.nodes();
  for (std::size_t b = 0; b < count; ++b) {
    BranchIndex idx;
    for (int i = 0; i < model.nodes(); ++i)
      idx.choice.push_back(((b >> i) & 1U) ? BranchSide::keep_v : BranchSide::keep_u);
    out.push_back(std::move(idx));
  }
  return out;
}

/// Coordinates of one normalization branch: the surviving u_i or v_i per node,
/// then the w_j.
inline std::vector<std::size_t> branch_coordinates(const LocalModel& model, const BranchIndex& branch) {
  std::vector<std::size_t> coords;
  for (int i = 0; i < model.nodes(); ++i)
    coords.push_back(branch.choice[static_cast<std::size_t>(i)] == BranchSide::keep_u ? model.u(i) : model.v(i));
  for (int j = 0; j < model.smooth(); ++j) coords.push_back(model.w(j));
  return coords;
}

/// Image of f on one branch of the normalization, a series in n + m variables.
inline PowerSeries branch_project(const ModelElement& f, const BranchIndex& branch) {
  const LocalModel& model = f.model();
  detail::require(branch.choice.size() == static_cast<std::size_t>(model.nodes()), "branch-length",
                  "branch index must have one entry per node");
  const auto coords = branch_coordinates(model, branch);
  const auto all_names = model.variables();
  std::vector<std::string> names;
  for (auto c : coords) names.push_back(all_names[c]);

  std::vector<bool> discarded(model.variable_count(), true);
  for (auto c : coords) discarded[c] = false;

  PowerSeries out(names, f.series().truncation());
  for (const auto& [e, c] : f.series().terms()) {
    bool killed = false;
    for (std::size_t k = 0; k < e.size() && !killed; ++k) killed = k < discarded.size() && discarded[k] && e[k] > 0;
    if (killed) continue;
    Exponent projected{};
    for (std::size_t k = 0; k < coords.size(); ++k) projected[k] = e[coords[k]];
    out.add_term(projected, c);
  }
  return out;
}

struct BranchOrder {
  BranchIndex branch;
  Order order;  // nullopt: projection is zero at the working truncation

  bool vanishes() const noexcept { return !order.has_value(); }
};

struct BranchOrders {
  std::vector<BranchOrder> entries;  // canonical branch order
  bool any_vanishing = false;        // decided at the working truncation only
  Order minimum;                     // over non-vanishing branches
};

inline BranchOrders branch_orders(const ModelElement& f) {
  detail::require(!f.is_zero(), "zero-element", "element is zero to truncation in O_std");
  BranchOrders result;
  for (auto& branch : enumerate_branches(f.model())) {
    const Order o = order(branch_project(f, branch));
    if (!o) result.any_vanishing = true;
    if (o && (!result.minimum || *o < *result.minimum)) result.minimum = o;
    result.entries.push_back({std::move(branch), o});
  }
  return result;
}

} // namespace ntheta
