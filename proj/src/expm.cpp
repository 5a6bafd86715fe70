#include "sspif/expm.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

namespace sspif {

Matrix expm(const Matrix& M) {
  if (M.rows() != M.cols()) throw InvalidArgument("expm needs a square matrix");
  if (!M.allFinite()) throw NonFinite("expm input contains NaN or Inf");
  const Eigen::Index n = M.rows();
  if (n == 0) return M;

  // Higham (2005) [13/13] coefficients.
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm = M.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Matrix A = M / std::ldexp(1.0, squarings);

  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  Matrix tmp = b[13] * A6 + b[11] * A4 + b[9] * A2;
  const Matrix U = A * (A6 * tmp + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  tmp = b[12] * A6 + b[10] * A4 + b[8] * A2;
  const Matrix V = A6 * tmp + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

  Matrix R = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < squarings; ++k) R = R * R;
  return R;
}

bool is_circulant(const Matrix& L) {
  const Eigen::Index n = L.rows();
  if (L.cols() != n) return false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (L(i, j) != L((i + 1) % n, (j + 1) % n)) return false;
  return true;
}

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace

Propagator Propagator::identity(Eigen::Index n) {
  Propagator p;
  p.kind_ = Kind::Identity;
  p.n_ = n;
  return p;
}

Propagator Propagator::dense(Matrix m) {
  Propagator p;
  p.kind_ = Kind::Dense;
  p.n_ = m.rows();
  p.dense_ = std::move(m);
  return p;
}

Propagator Propagator::circulant_exp(const Vector& kernel, double tau) {
  Propagator p;
  p.kind_ = Kind::Circulant;
  p.n_ = kernel.size();
  std::vector<double> k(kernel.data(), kernel.data() + kernel.size());
  std::vector<std::complex<double>> mu;
  fft_engine().fwd(mu, k);
  p.spectrum_.resize(p.n_);
  for (Eigen::Index i = 0; i < p.n_; ++i) p.spectrum_(i) = std::exp(tau * mu[static_cast<std::size_t>(i)]);
  return p;
}

Vector Propagator::apply(const Vector& x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Dense:
      return dense_ * x;
    case Kind::Circulant: {
      auto& fft = fft_engine();
      std::vector<double> in(x.data(), x.data() + x.size());
      std::vector<std::complex<double>> spec;
      fft.fwd(spec, in);
      for (Eigen::Index i = 0; i < n_; ++i) spec[static_cast<std::size_t>(i)] *= spectrum_(i);
      std::vector<double> out;
      fft.inv(out, spec);
      return Eigen::Map<const Vector>(out.data(), n_);
    }
  }
  return x;
}

Matrix Propagator::matrix() const {
  Matrix m(n_, n_);
  for (Eigen::Index j = 0; j < n_; ++j) m.col(j) = apply(Vector::Unit(n_, j));
  return m;
}

std::int64_t gap_key(double gap) { return std::llround(gap * 1e14); }

ExpCache::ExpCache(const Matrix& L, double dt, const std::vector<double>& gaps, bool allow_negative)
    : dt_(dt) {
  if (L.rows() != L.cols()) throw InvalidArgument("ExpCache needs a square L");
  if (!L.allFinite() || !std::isfinite(dt)) throw NonFinite("ExpCache input contains NaN or Inf");
  const Eigen::Index n = L.rows();
  const bool circulant = n >= 8 && is_circulant(L);
  const Vector kernel = circulant ? Vector(L.col(0)) : Vector();
  for (double g : gaps) {
    if (!allow_negative && g < -1e-13) {
      std::ostringstream msg;
      msg << "integrating-factor step needs e^{gL} with negative gap " << g;
      throw NegativeGap(msg.str());
    }
    const std::int64_t key = gap_key(g);
    if (entries_.count(key)) continue;
    const double tau = static_cast<double>(key) * 1e-14 * dt;
    if (key == 0 || tau == 0.0) {
      entries_.emplace(key, Propagator::identity(n));
      continue;
    }
    entries_.emplace(key, circulant ? Propagator::circulant_exp(kernel, tau) : Propagator::dense(expm(tau * L)));
    ++constructed_;
  }
}

const Propagator& ExpCache::entry(double gap) const {
  const auto it = entries_.find(gap_key(gap));
  if (it == entries_.end()) {
    std::ostringstream msg;
    msg << "gap " << gap << " not present in exponential cache";
    throw InvalidArgument(msg.str());
  }
  return it->second;
}

std::vector<double> ExpCache::gaps() const {
  std::vector<double> out;
  for (const auto& [key, prop] : entries_) out.push_back(static_cast<double>(key) * 1e-14);
  return out;
}

std::vector<double> abscissa_gaps(const Vector& c) {
  std::vector<double> gaps;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) gaps.push_back(c(i) - c(j));
  for (Eigen::Index j = 0; j < c.size(); ++j) gaps.push_back(1.0 - c(j));
  return gaps;
}

ExpCache build_cache(const Matrix& L, double dt, const Vector& c) {
  if (c.size() == 0 || std::abs(c(0)) > 1e-13) throw InvalidArgument("abscissas must start at 0");
  return ExpCache(L, dt, abscissa_gaps(c));
}

}  // namespace sspif
