#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

namespace stylo::detail {

// Dot products are clipped to this range before the logistic function.
inline constexpr double kMaxDot = 6.0;

template <class Real>
Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class Real>
Real sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

// Negative-sampling logistic loss of one example:
//   L = -log sigmoid(h.o_t) - sum_n log sigmoid(-h.o_n)
// with each dot product clipped to [-kMaxDot, kMaxDot].
//
// When g_scores is nonempty it receives dL/d(score_j) for the target
// (entry 0) followed by the negatives. The clip is part of the function,
// so the gradient is zero where a dot product lies outside the clip range.
// dL/dW_out[row_j] = g_scores[j] * h and dL/dh = sum_j g_scores[j] * o_j.
template <class Real, class OutRowFn>
double ns_loss(std::span<const Real> h, std::uint32_t target,
               std::span<const std::uint32_t> negatives, OutRowFn&& out_row,
               std::span<Real> g_scores = {}) {
  double loss = 0.0;
  const std::size_t n_rows = 1 + negatives.size();
  for (std::size_t j = 0; j < n_rows; ++j) {
    const std::uint32_t row = j == 0 ? target : negatives[j - 1];
    const Real label = j == 0 ? Real(1) : Real(0);
    const Real s = dot<Real>(h, out_row(row));
    const bool inside = std::abs(static_cast<double>(s)) < kMaxDot;
    const double c = std::clamp(static_cast<double>(s), -kMaxDot, kMaxDot);
    // -log sigmoid(c) = log1p(exp(-c)); -log sigmoid(-c) = log1p(exp(c))
    loss += j == 0 ? std::log1p(std::exp(-c)) : std::log1p(std::exp(c));
    if (!g_scores.empty()) {
      const Real g = static_cast<Real>(sigmoid(c)) - label;
      g_scores[j] = inside ? g : Real(0);
    }
  }
  return loss;
}

}  // namespace stylo::detail
