#pragma once

#include "sspif/types.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace sspif {

/// Matrix exponential by scaling and squaring with the [13/13] Pade
/// approximant.  Throws NonFinite on NaN/Inf input.
Matrix expm(const Matrix& M);

/// True when every row of L is the previous row rotated one place right.
bool is_circulant(const Matrix& L);

/// The linear map x -> e^{tau L} x.  Circulant generators are held by their
/// spectrum and applied with FFTs; everything else is a dense matrix.
class Propagator {
 public:
  static Propagator identity(Eigen::Index n);
  static Propagator dense(Matrix m);
  /// `kernel` is the first column of a circulant L; builds e^{tau L}.
  static Propagator circulant_exp(const Vector& kernel, double tau);

  Eigen::Index size() const { return n_; }
  Vector apply(const Vector& x) const;
  /// Dense matrix of the map (materialized on request for circulants).
  Matrix matrix() const;

 private:
  enum class Kind { Identity, Dense, Circulant };
  Kind kind_ = Kind::Identity;
  Eigen::Index n_ = 0;
  Matrix dense_;
  Eigen::VectorXcd spectrum_;
};

/// Quantized key of an abscissa gap (resolution 1e-14).
std::int64_t gap_key(double gap);

/// e^{g dt L} for every gap g an integrating-factor step needs, built once per
/// (L, dt) and read-only afterwards.
class ExpCache {
 public:
  /// Builds one exponential per distinct quantized gap.  Unless
  /// `allow_negative` is set, a gap below -1e-13 throws NegativeGap.
  ExpCache(const Matrix& L, double dt, const std::vector<double>& gaps, bool allow_negative = false);

  double dt() const { return dt_; }
  /// Number of exponentials actually computed (the zero gap is free).
  std::size_t construction_count() const { return constructed_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(double gap) const { return entries_.count(gap_key(gap)) != 0; }
  /// Throws InvalidArgument for a gap not present in the cache.
  const Propagator& entry(double gap) const;
  std::vector<double> gaps() const;

 private:
  double dt_;
  std::size_t constructed_ = 0;
  std::map<std::int64_t, Propagator> entries_;
};

/// All gaps c_i - c_j (i > j) and 1 - c_j of an abscissa vector.
std::vector<double> abscissa_gaps(const Vector& c);

/// Cache for the non-negative gaps of `c`; c must start at 0 and be
/// non-decreasing (NegativeGap otherwise).
ExpCache build_cache(const Matrix& L, double dt, const Vector& c);

}  // namespace sspif
