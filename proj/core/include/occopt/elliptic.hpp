#pragma once

namespace occopt {

/// Elliptic parameter m in [0, 1], with dn^2 = 1 - m sn^2 (not the modulus k = sqrt(m)).
class EllipticParameter {
 public:
  /// Parameters closer than this to 1 use the hyperbolic (sech) formulas.
  static constexpr double kDegenerateGap = 1e-12;

  /// Throws InputError unless 0 <= m <= 1.
  explicit EllipticParameter(double m);

  double value() const noexcept { return m_; }
  /// 1 - m, exact for m in [0.5, 1].
  double complement() const noexcept { return 1.0 - m_; }
  bool degenerate() const noexcept { return complement() <= kDegenerateGap; }

 private:
  double m_;
};

/// Complete elliptic integral of the first kind K(m) = pi / (2 AGM(1, sqrt(1 - m))).
/// Throws InputError for m = 1 (divergent).
double elliptic_K(EllipticParameter m);

struct JacobiValues {
  double am;
  double dn;
  double sn;
  double cn;
};

/// Amplitude and Jacobi sn, cn, dn at real argument u by descending Landen
/// (AGM) transformation. m = 0 and degenerate m use the circular and
/// hyperbolic closed forms respectively.
JacobiValues jacobi_am_dn_sn_cn(double u, EllipticParameter m);

}  // namespace occopt
