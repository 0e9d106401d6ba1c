#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace nebed {

// Logits are clamped to this magnitude before the sigmoid, which keeps both
// log(score) and log(1 - score) finite for any representable rows.
inline constexpr double kLogitClamp = 30.0;

inline double logistic(double x) noexcept {
  x = std::clamp(x, -kLogitClamp, kLogitClamp);
  return 1.0 / (1.0 + std::exp(-x));
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) noexcept {
  T sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

/// sigma(v . c), clamped to [sigma(-30), sigma(30)].
template <typename T>
double sgns_score(std::span<const T> v, std::span<const T> c) noexcept {
  return logistic(static_cast<double>(dot(v, c)));
}

/// Logistic loss -[y log s + (1 - y) log(1 - s)] of one pair.
template <typename T>
double sgns_loss(std::span<const T> v, std::span<const T> c, int label) noexcept {
  const double x = std::clamp(static_cast<double>(dot(v, c)), -kLogitClamp, kLogitClamp);
  // -log sigma(x) and -log sigma(-x), written with log1p for accuracy.
  return label ? std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// One SGD step on the pair: with g = sigma(v.c) - label,
/// v -= lr * g * c and c -= lr * g * v_old. Returns the pre-update loss.
template <typename T>
double sgns_update(std::span<T> v, std::span<T> c, int label, T lr) noexcept {
  const double x = std::clamp(static_cast<double>(dot<T>(v, c)), -kLogitClamp, kLogitClamp);
  const double score = 1.0 / (1.0 + std::exp(-x));
  const T step = static_cast<T>(lr * static_cast<T>(score - label));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const T vi = v[i];
    const T ci = c[i];
    v[i] = vi - step * ci;
    c[i] = ci - step * vi;
  }
  return label ? std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace nebed
