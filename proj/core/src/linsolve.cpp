#include "sparsect/linsolve.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "sparsect/errors.hpp"
#include "sparsect/fft.hpp"
#include "sparsect/random.hpp"
#include "sparsect/regularizers.hpp"
#include "sparsect/vecmath.hpp"

namespace sparsect {

XStepOperator::XStepOperator(const ProjectionOperator* projector, double rho1, double rho2,
                             double rho3, std::size_t width, std::size_t height)
    : projector_(projector), rho1_(rho1), rho2_(rho2), rho3_(rho3), width_(width),
      height_(height) {
  if (rho1 < 0.0 || rho2 < 0.0 || rho3 < 0.0)
    throw ValidationError("XStepOperator: penalties must be >= 0");
  if (width == 0 || height == 0) throw ValidationError("XStepOperator: empty grid");
  if (projector && (projector->width() != width || projector->height() != height))
    throw ValidationError("XStepOperator: projector dims do not match grid");
}

Image2D XStepOperator::apply(const Image2D& x) const {
  if (x.width != width_ || x.height != height_)
    throw ValidationError("XStepOperator::apply: dims do not match operator");
  Image2D out(width_, height_, 0.0);
  if (projector_) {
    Image2D back = projector_->adjoint(projector_->forward(x));
    axpy(1.0, back.data, out.data);
  }
  if (rho1_ != 0.0) {
    Image2D t = grad_x_adjoint(grad_x(x));
    axpy(rho1_, t.data, out.data);
  }
  if (rho2_ != 0.0) {
    Image2D t = grad_y_adjoint(grad_y(x));
    axpy(rho2_, t.data, out.data);
  }
  if (rho3_ != 0.0) axpy(rho3_, x.data, out.data);
  return out;
}

double estimate_ata_scale(const ProjectionOperator& projector, std::size_t n_probes) {
  if (n_probes == 0) throw ValidationError("estimate_ata_scale: need at least one probe");
  const std::size_t n = projector.width() * projector.height();
  auto eng = seeded_engine(0x7ace5eedcafef00dULL);
  double sum = 0.0;
  Image2D probe(projector.width(), projector.height());
  for (std::size_t p = 0; p < n_probes; ++p) {
    for (double& v : probe.data) v = (eng() & 1u) ? 1.0 : -1.0;
    Sinogram s = projector.forward(probe);
    sum += dot(s.data, s.data);
  }
  return sum / (static_cast<double>(n_probes) * static_cast<double>(n));
}

namespace {

double laplacian_symbol(std::size_t k, std::size_t n) {
  const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  return 4.0 * s * s;
}

}  // namespace

CirculantPreconditioner::CirculantPreconditioner(std::size_t width, std::size_t height, double c_a,
                                                 double rho1, double rho2, double rho3)
    : width_(width), height_(height), c_a_(c_a), rho1_(rho1), rho2_(rho2), rho3_(rho3) {
  if (width == 0 || height == 0) throw ValidationError("CirculantPreconditioner: empty grid");
  if (c_a < 0.0) throw ValidationError("CirculantPreconditioner: c_A must be >= 0");
  if (rho1 < 0.0 || rho2 < 0.0 || rho3 < 0.0)
    throw ValidationError("CirculantPreconditioner: penalties must be >= 0");
  if (c_a + rho3 <= 0.0)
    throw ValidationError("CirculantPreconditioner: c_A + rho3 must be > 0 for invertibility");
  const std::size_t hw = fft::half_spectrum(width);
  lambda_.resize(height * hw);
  for (std::size_t k2 = 0; k2 < height; ++k2)
    for (std::size_t k1 = 0; k1 < hw; ++k1) lambda_[k2 * hw + k1] = eigenvalue(k1, k2);
}

double CirculantPreconditioner::eigenvalue(std::size_t k1, std::size_t k2) const {
  if (k1 >= width_ || k2 >= height_)
    throw ValidationError("CirculantPreconditioner::eigenvalue: frequency index out of range");
  return c_a_ + rho1_ * laplacian_symbol(k1, width_) + rho2_ * laplacian_symbol(k2, height_) +
         rho3_;
}

Image2D CirculantPreconditioner::transform(const Image2D& in, bool invert) const {
  if (in.width != width_ || in.height != height_)
    throw ValidationError("CirculantPreconditioner: dims do not match grid");
  const std::size_t hw = fft::half_spectrum(width_);
  std::vector<std::complex<double>> spec(height_ * hw);
  fft::forward2d(width_, height_, in.data.data(), spec.data());
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec[i] = invert ? spec[i] / lambda_[i] : spec[i] * lambda_[i];
  Image2D out(width_, height_);
  fft::inverse2d(width_, height_, spec.data(), out.data.data());
  return out;
}

Image2D CirculantPreconditioner::solve(const Image2D& r) const { return transform(r, true); }

Image2D CirculantPreconditioner::apply(const Image2D& x) const { return transform(x, false); }

PcgResult pcg_solve(const XStepOperator& op, const Image2D& rhs, const Image2D& x0,
                    std::size_t max_iter, double tol, const CirculantPreconditioner* precond) {
  if (rhs.width != op.width() || rhs.height != op.height())
    throw ValidationError("pcg_solve: rhs dims do not match operator");
  if (!rhs.same_dims(x0)) throw ValidationError("pcg_solve: x0 dims do not match rhs");
  if (precond && (precond->width() != op.width() || precond->height() != op.height()))
    throw ValidationError("pcg_solve: preconditioner dims do not match operator");
  if (tol <= 0.0) throw ValidationError("pcg_solve: tol must be > 0");

  PcgResult result;
  result.x = x0;
  const double rhs_norm = norm2(rhs.data);
  const double denom = rhs_norm > 0.0 ? rhs_norm : 1.0;

  Image2D r = rhs;
  {
    Image2D mx = op.apply(result.x);
    axpy(-1.0, mx.data, r.data);
  }
  double r_norm = norm2(r.data);
  result.relative_residual = r_norm / denom;
  if (r_norm == 0.0 || max_iter == 0) return result;

  Image2D z = precond ? precond->solve(r) : r;
  Image2D p = z;
  double rz = dot(r.data, z.data);

  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    if (rz < 0.0) throw NumericalError("pcg_solve: preconditioner is not positive definite");
    if (rz == 0.0) break;
    Image2D mp = op.apply(p);
    const double p_mp = dot(p.data, mp.data);
    if (!std::isfinite(p_mp) || p_mp <= 0.0)
      throw NumericalError("pcg_solve: operator is not positive definite (p'Mp = " +
                           std::to_string(p_mp) + " at iteration " + std::to_string(iter) + ")");
    const double alpha = rz / p_mp;
    axpy(alpha, p.data, result.x.data);
    axpy(-alpha, mp.data, r.data);
    r_norm = norm2(r.data);
    if (!std::isfinite(r_norm))
      throw NumericalError("pcg_solve: non-finite residual at iteration " + std::to_string(iter));
    result.iterations = iter;
    result.residual_norms.push_back(r_norm);
    result.relative_residual = r_norm / denom;
    if (result.relative_residual <= tol) break;
    if (iter == max_iter) break;
    z = precond ? precond->solve(r) : r;
    const double rz_next = dot(r.data, z.data);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = z.data[i] + beta * p.data[i];
  }
  return result;
}

}  // namespace sparsect
