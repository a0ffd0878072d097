#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

// P-square streaming quantile estimator (Jain & Chlamtac 1985): five markers
// tracked with piecewise-parabolic height updates, O(1) memory per series.
// Exact while fewer than five observations have arrived.

namespace svl {

class P2Quantile {
 public:
  explicit P2Quantile(double p) : p_(p) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("P2Quantile: p must be in (0,1)");
  }

  void add(double x) {
    if (count_ < 5) {
      head_[count_++] = x;
      if (count_ == 5) {
        std::sort(head_.begin(), head_.end());
        for (int i = 0; i < 5; ++i) {
          q_[i] = head_[i];
          n_[i] = i + 1;
        }
        nd_[0] = 1.0;
        nd_[1] = 1.0 + 2.0 * p_;
        nd_[2] = 1.0 + 4.0 * p_;
        nd_[3] = 3.0 + 2.0 * p_;
        nd_[4] = 5.0;
      }
      return;
    }
    ++count_;
    int k;
    if (x < q_[0]) {
      q_[0] = x;
      k = 0;
    } else if (x >= q_[4]) {
      q_[4] = x;
      k = 3;
    } else {
      k = 0;
      while (k < 3 && x >= q_[k + 1]) ++k;
    }
    for (int i = k + 1; i < 5; ++i) ++n_[i];
    nd_[1] += p_ / 2.0;
    nd_[2] += p_;
    nd_[3] += (1.0 + p_) / 2.0;
    nd_[4] += 1.0;
    for (int i = 1; i <= 3; ++i) {
      const double d = nd_[i] - n_[i];
      if ((d >= 1.0 && n_[i + 1] - n_[i] > 1) ||
          (d <= -1.0 && n_[i - 1] - n_[i] < -1)) {
        const int s = d >= 0.0 ? 1 : -1;
        const double qp = parabolic(i, s);
        if (q_[i - 1] < qp && qp < q_[i + 1])
          q_[i] = qp;
        else
          q_[i] = linear(i, s);
        n_[i] += s;
      }
    }
  }

  long count() const { return count_; }

  double value() const {
    if (count_ == 0) throw std::logic_error("P2Quantile: empty");
    if (count_ < 5) {
      // exact type-7 quantile over the buffered head
      std::array<double, 5> v = head_;
      std::sort(v.begin(), v.begin() + count_);
      const double idx = p_ * static_cast<double>(count_ - 1);
      const auto lo = static_cast<long>(std::floor(idx));
      const auto hi = std::min<long>(lo + 1, count_ - 1);
      const double w = idx - static_cast<double>(lo);
      return (1.0 - w) * v[lo] + w * v[hi];
    }
    return q_[2];
  }

 private:
  double parabolic(int i, int s) const {
    const double ds = s;
    const double n0 = n_[i - 1], n1 = n_[i], n2 = n_[i + 1];
    return q_[i] + ds / (n2 - n0) *
                       ((n1 - n0 + ds) * (q_[i + 1] - q_[i]) / (n2 - n1) +
                        (n2 - n1 - ds) * (q_[i] - q_[i - 1]) / (n1 - n0));
  }

  double linear(int i, int s) const {
    return q_[i] + s * (q_[i + s] - q_[i]) / (n_[i + s] - n_[i]);
  }

  double p_;
  long count_ = 0;
  std::array<double, 5> head_{};
  std::array<double, 5> q_{};
  std::array<double, 5> nd_{};
  std::array<long, 5> n_{};
};

}  // namespace svl
