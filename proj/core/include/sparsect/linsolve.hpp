#pragma once

#include <cstddef>
#include <vector>

#include "sparsect/image.hpp"
#include "sparsect/projection.hpp"

namespace sparsect {

/// Normal-equations operator of the image update,
///
///   M x = A^T A x + rho1 Dx^T Dx x + rho2 Dy^T Dy x + rho3 x,
///
/// applied matrix-free. `projector == nullptr` drops the data term (A = 0).
/// rho3 > 0 keeps M positive definite even when A is rank-deficient.
class XStepOperator {
 public:
  XStepOperator(const ProjectionOperator* projector, double rho1, double rho2, double rho3,
                std::size_t width, std::size_t height);

  Image2D apply(const Image2D& x) const;

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  double rho1() const { return rho1_; }
  double rho2() const { return rho2_; }
  double rho3() const { return rho3_; }
  const ProjectionOperator* projector() const { return projector_; }

 private:
  const ProjectionOperator* projector_;
  double rho1_;
  double rho2_;
  double rho3_;
  std::size_t width_;
  std::size_t height_;
};

/// Scalar stand-in for A^T A inside the preconditioner: trace(A^T A)/(W*H),
/// estimated with `n_probes` Rademacher probes (E[|Az|^2] = trace(A^T A)).
/// Uses a fixed internal seed so the estimate is reproducible.
double estimate_ata_scale(const ProjectionOperator& projector, std::size_t n_probes = 8);

/// Circulant surrogate of XStepOperator, diagonal in the 2D Fourier basis:
///
///   lambda(k1, k2) = c_A + rho1 * 4 sin^2(pi k1 / W)
///                        + rho2 * 4 sin^2(pi k2 / H) + rho3.
///
/// The gradient part is exact (periodic differences are circulant); A^T A is
/// absorbed into the scalar c_A. solve() divides by the eigenvalues in the
/// frequency domain; apply() multiplies, so apply(solve(x)) round-trips.
class CirculantPreconditioner {
 public:
  CirculantPreconditioner(std::size_t width, std::size_t height, double c_a, double rho1,
                          double rho2, double rho3);

  Image2D solve(const Image2D& r) const;
  Image2D apply(const Image2D& x) const;

  double eigenvalue(std::size_t k1, std::size_t k2) const;
  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

 private:
  Image2D transform(const Image2D& in, bool invert) const;

  std::size_t width_;
  std::size_t height_;
  double c_a_;
  double rho1_;
  double rho2_;
  double rho3_;
  std::vector<double> lambda_;  // height x (width/2 + 1) half-spectrum grid
};

struct PcgResult {
  Image2D x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> residual_norms;  // |r| after each iteration
};

/// Preconditioned conjugate gradient on M x = rhs, warm-started from x0.
/// Stops when |r|/|rhs| <= tol or after max_iter iterations, whichever comes
/// first; the tolerance is only checked after an iteration has run, so
/// max_iter = 1 performs exactly one update regardless of the residual.
/// `precond` may be null (plain CG).
PcgResult pcg_solve(const XStepOperator& op, const Image2D& rhs, const Image2D& x0,
                    std::size_t max_iter, double tol,
                    const CirculantPreconditioner* precond = nullptr);

}  // namespace sparsect
