#pragma once

// Linear/Gaussian system with Bernoulli observation arrivals:
//   x(k+1) = A x(k) + B w(k),   y(k) = C x(k) + e(k)
// and the two covariance maps driven by the arrivals:
//   h(P) = A P A^T + Q                    (no observation)
//   g(P) = ((A P A^T + Q)^{-1} + Info)^{-1} (observation received)
// with Q = B B^T and Info = C^T C.

#include <cstdint>

#include "lgb/spd.hpp"

namespace lgb {

class SystemModel {
 public:
  /// A: n x n, B: n x p, C: q x n.
  SystemModel(Matrix a, Matrix b, Matrix c);

  static SystemModel scalar(double a, double b, double c);

  [[nodiscard]] Index dim() const noexcept { return a_.rows(); }
  [[nodiscard]] const Matrix& A() const noexcept { return a_; }
  [[nodiscard]] const Matrix& B() const noexcept { return b_; }
  [[nodiscard]] const Matrix& C() const noexcept { return c_; }
  [[nodiscard]] const SymMatrix& Q() const noexcept { return q_; }
  [[nodiscard]] const SymMatrix& Info() const noexcept { return info_; }
  [[nodiscard]] bool is_scalar() const noexcept { return dim() == 1; }

  /// FNV-1a over the dimensions and the raw bytes of A, B, C.
  [[nodiscard]] std::uint64_t fingerprint() const;

 private:
  Matrix a_, b_, c_;
  SymMatrix q_, info_;
};

struct StructuralReport {
  bool a_invertible = false;
  bool controllable = false;
  bool observable = false;
  bool stabilizable = false;
  bool detectable = false;
  /// Smallest k with rank [C; CA; ...; CA^{k-1}] = n, or 0 if unobservable.
  int observability_index = 0;
};

/// Numerical rank with threshold 1e-10 * largest singular value.
int numerical_rank(const Matrix& m);

StructuralReport validate(const SystemModel& model);

/// h(P) = A P A^T + Q. Throws DegenerateCovariance if the result is singular.
SpdMatrix map_h(const SystemModel& model, const SpdMatrix& p);

/// g(P) = ((A P A^T + Q)^{-1} + Info)^{-1}, evaluated as written.
SpdMatrix map_g(const SystemModel& model, const SpdMatrix& p);

/// Information-form g: Y -> (A Y^{-1} A^T + Q)^{-1} + Info, evaluated as
/// M (I + Q M)^{-1} + Info with M = A^{-T} Y A^{-1} so that singular Y
/// (including Y = 0) is admissible. Throws SingularDynamics if A is singular.
SymMatrix map_g_info(const SystemModel& model, const SymMatrix& y);

struct FixedPointOptions {
  double tol = 1e-13;
  int max_iter = 100000;
};

/// Fixed point of g by plain iteration, started from I and from 100 I; the
/// two limits must agree to 1e-8 relative.
SpdMatrix fixed_point(const SystemModel& model, const FixedPointOptions& options = {});

/// sup_{P >= P_inf} g^n(P): n information-form steps from Y = 0, inverted.
SpdMatrix pessimist_reset(const SystemModel& model, int n);
/// Same, with n = observability index.
SpdMatrix pessimist_reset(const SystemModel& model);

}  // namespace lgb
