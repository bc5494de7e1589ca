#pragma once
// Truncated power series in one or two parameters with complex coefficients.
// Truncation is by per-variable caps (a monomial ideal), so products and logs
// of truncated series have exactly correct retained coefficients.

#include <array>
#include <vector>

#include "juliadyn/common.hpp"

namespace juliadyn {

class TruncatedSeries2 {
 public:
  TruncatedSeries2(int cap1, int cap2)
      : cap1_(cap1), cap2_(cap2),
        coef_((cap1 + 1) * (cap2 + 1), cplx{0.0, 0.0}) {}

  static TruncatedSeries2 constant(cplx v, int cap1, int cap2) {
    TruncatedSeries2 s(cap1, cap2);
    s.at(0, 0) = v;
    return s;
  }

  int cap1() const { return cap1_; }
  int cap2() const { return cap2_; }

  cplx& at(int i, int j) { return coef_[i * (cap2_ + 1) + j]; }
  const cplx& at(int i, int j) const { return coef_[i * (cap2_ + 1) + j]; }

  TruncatedSeries2& operator+=(const TruncatedSeries2& o) {
    for (std::size_t k = 0; k < coef_.size(); ++k) coef_[k] += o.coef_[k];
    return *this;
  }
  TruncatedSeries2& operator-=(const TruncatedSeries2& o) {
    for (std::size_t k = 0; k < coef_.size(); ++k) coef_[k] -= o.coef_[k];
    return *this;
  }
  TruncatedSeries2& operator*=(cplx s) {
    for (cplx& v : coef_) v *= s;
    return *this;
  }

  friend TruncatedSeries2 operator+(TruncatedSeries2 a, const TruncatedSeries2& b) {
    a += b;
    return a;
  }
  friend TruncatedSeries2 operator-(TruncatedSeries2 a, const TruncatedSeries2& b) {
    a -= b;
    return a;
  }
  friend TruncatedSeries2 operator*(const TruncatedSeries2& a,
                                    const TruncatedSeries2& b) {
    TruncatedSeries2 out(a.cap1_, a.cap2_);
    for (int i1 = 0; i1 <= a.cap1_; ++i1)
      for (int j1 = 0; j1 <= a.cap2_; ++j1) {
        const cplx va = a.at(i1, j1);
        if (va == cplx{0.0, 0.0}) continue;
        for (int i2 = 0; i1 + i2 <= a.cap1_; ++i2)
          for (int j2 = 0; j1 + j2 <= a.cap2_; ++j2)
            out.at(i1 + i2, j1 + j2) += va * b.at(i2, j2);
      }
    return out;
  }

  // Principal-branch log; requires a nonzero constant term.  Writing
  // X = c (1 + u) with u free of constant term, u^m vanishes beyond total
  // degree cap1+cap2, so the Mercator series below is exact on the retained
  // coefficients.
  TruncatedSeries2 log() const {
    const cplx c0 = at(0, 0);
    require(std::abs(c0) > 1e-300, ErrorCode::SingularIntegrand,
            "log of a series with vanishing constant term");
    TruncatedSeries2 u = *this;
    u *= 1.0 / c0;
    u.at(0, 0) = 0.0;
    TruncatedSeries2 out = constant(std::log(c0), cap1_, cap2_);
    TruncatedSeries2 upow = u;
    const int maxm = cap1_ + cap2_;
    for (int m = 1; m <= maxm; ++m) {
      TruncatedSeries2 term = upow;
      term *= cplx{(m % 2 == 1 ? 1.0 : -1.0) / m, 0.0};
      out += term;
      if (m < maxm) upow = upow * u;
    }
    return out;
  }

 private:
  int cap1_, cap2_;
  std::vector<cplx> coef_;
};

}  // namespace juliadyn
