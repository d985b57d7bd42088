// 24 noiseless BBOB-style benchmark functions with per-instance
// transformations, a known optimum and evaluation counting.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajas::bbob {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kLowerBound = -5.0;
inline constexpr double kUpperBound = 5.0;

// ---------------------------------------------------------------------------
// Legacy benchmark-suite RNG. Instance shifts and rotations are derived from
// this generator so that (function_id, instance_id) fully determines them.

namespace detail {

inline std::vector<double> unif(std::size_t n, long inseed) {
  if (inseed < 0) inseed = -inseed;
  if (inseed < 1) inseed = 1;
  double rgrand[32] = {};
  double aktseed = static_cast<double>(inseed);
  for (int i = 39; i >= 0; --i) {
    double tmp = std::floor(aktseed / 127773.0);
    aktseed = 16807.0 * (aktseed - tmp * 127773.0) - 2836.0 * tmp;
    if (aktseed < 0) aktseed += 2147483647.0;
    if (i < 32) rgrand[i] = aktseed;
  }
  double aktrand = rgrand[0];
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double tmp = std::floor(aktseed / 127773.0);
    aktseed = 16807.0 * (aktseed - tmp * 127773.0) - 2836.0 * tmp;
    if (aktseed < 0) aktseed += 2147483647.0;
    int j = static_cast<int>(std::floor(aktrand / 67108865.0));
    aktrand = rgrand[j];
    rgrand[j] = aktseed;
    r[i] = aktrand / 2.147483647e9;
    if (r[i] == 0.0) r[i] = 1e-99;
  }
  return r;
}

inline std::vector<double> gauss(std::size_t n, long seed) {
  const std::vector<double> r = unif(2 * n, seed);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::sqrt(-2.0 * std::log(r[i])) * std::cos(2.0 * M_PI * r[n + i]);
    if (g[i] == 0.0) g[i] = 1e-99;
  }
  return g;
}

inline VectorXd compute_xopt(long rseed, int dim) {
  const std::vector<double> u = unif(dim, rseed);
  VectorXd x(dim);
  for (int i = 0; i < dim; ++i) {
    x[i] = 8.0 * std::floor(1e4 * u[i]) / 1e4 - 4.0;
    if (x[i] == 0.0) x[i] = -1e-5;
  }
  return x;
}

inline long base_seed(int function_id) {
  if (function_id == 4) return 3;
  if (function_id == 18) return 17;
  return function_id;
}

inline double compute_fopt(int function_id, int instance_id) {
  const long rseed = base_seed(function_id) + 10000L * instance_id;
  const double g1 = gauss(1, rseed)[0];
  const double g2 = gauss(1, rseed + 1)[0];
  const double v = std::floor(100.0 * 100.0 * g1 / g2 + 0.5) / 100.0;
  return std::min(1000.0, std::max(-1000.0, v));
}

// Gram-Schmidt on rows of a seeded Gaussian matrix.
inline MatrixXd compute_rotation(long seed, int dim) {
  const std::vector<double> g = gauss(static_cast<std::size_t>(dim) * dim, seed);
  MatrixXd b(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) b(i, j) = g[i * dim + j];
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j)
      b.row(i) -= b.row(i).dot(b.row(j)) * b.row(j);
    b.row(i) /= b.row(i).norm();
  }
  return b;
}

inline double t_osz_scalar(double v) {
  if (v == 0.0) return 0.0;
  const double xhat = std::log(std::abs(v));
  const double c1 = v > 0.0 ? 10.0 : 5.5;
  const double c2 = v > 0.0 ? 7.9 : 3.1;
  const double s = v > 0.0 ? 1.0 : -1.0;
  return s * std::exp(xhat + 0.049 * (std::sin(c1 * xhat) + std::sin(c2 * xhat)));
}

inline VectorXd t_osz(const VectorXd& x) {
  VectorXd z(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) z[i] = t_osz_scalar(x[i]);
  return z;
}

inline VectorXd t_asy(const VectorXd& x, double beta) {
  const int d = static_cast<int>(x.size());
  VectorXd z(d);
  for (int i = 0; i < d; ++i) {
    if (x[i] > 0.0) {
      const double e =
          1.0 + beta * static_cast<double>(i) / std::max(d - 1, 1) * std::sqrt(x[i]);
      z[i] = std::pow(x[i], e);
    } else {
      z[i] = x[i];
    }
  }
  return z;
}

inline VectorXd lambda_diag(double alpha, int dim) {
  VectorXd l(dim);
  for (int i = 0; i < dim; ++i)
    l[i] = std::pow(alpha, 0.5 * static_cast<double>(i) / std::max(dim - 1, 1));
  return l;
}

inline double f_pen(const VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i]) - 5.0;
    if (d > 0.0) s += d * d;
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct ProblemId {
  int function_id = 1;
  int instance_id = 1;
  int dimension = 5;
};

class ProblemInstance {
 public:
  explicit ProblemInstance(ProblemId id) : id_(id) {
    if (id.function_id < 1 || id.function_id > 24)
      throw std::invalid_argument("function_id must be in 1..24, got " +
                                  std::to_string(id.function_id));
    if (id.instance_id < 1)
      throw std::invalid_argument("instance_id must be >= 1");
    if (id.dimension < 2)
      throw std::invalid_argument("dimension must be >= 2, got " +
                                  std::to_string(id.dimension));
    build();
  }

  const ProblemId& id() const { return id_; }
  const VectorXd& x_opt() const { return xopt_; }
  double f_opt() const { return fopt_; }

  // f(x) including the f-shift; no budget accounting.
  double evaluate_raw(const VectorXd& x) const { return raw(x) + fopt_; }

  // max(f - f_opt, 0); tiny round-off negatives are clamped.
  double target_precision(double f_value) const {
    return std::max(f_value - fopt_, 0.0);
  }

 private:
  void build() {
    const int d = id_.dimension;
    const int fid = id_.function_id;
    rseed_ = detail::base_seed(fid) + 10000L * id_.instance_id;
    fopt_ = detail::compute_fopt(fid, id_.instance_id);
    rot_ = detail::compute_rotation(rseed_ + 1000000, d);
    rot2_ = detail::compute_rotation(rseed_, d);
    xopt_ = detail::compute_xopt(rseed_, d);
    switch (fid) {
      case 4:
        for (int i = 0; i < d; i += 2) xopt_[i] = std::abs(xopt_[i]);
        break;
      case 5:
        for (int i = 0; i < d; ++i) xopt_[i] = xopt_[i] > 0 ? 5.0 : -5.0;
        break;
      case 8:
        xopt_ *= 0.75;
        break;
      case 9:
      case 19: {
        const double c = std::max(1.0, std::sqrt(d) / 8.0);
        xopt_ = rot_.transpose() * VectorXd::Constant(d, 0.5) / c;
        break;
      }
      case 20: {
        const auto u = detail::unif(d, rseed_);
        for (int i = 0; i < d; ++i)
          xopt_[i] = 0.5 * 4.2096874633 * (u[i] - 0.5 > 0 ? 1.0 : -1.0);
        break;
      }
      case 21:
      case 22:
        init_gallagher();
        break;
      case 24: {
        const auto u = detail::unif(d, rseed_);
        for (int i = 0; i < d; ++i)
          xopt_[i] = 0.5 * 2.5 * (u[i] - 0.5 > 0 ? 1.0 : -1.0);
        break;
      }
      default:
        break;
    }
  }

  void init_gallagher() {
    const int d = id_.dimension;
    const int n = id_.function_id == 21 ? 101 : 21;
    npeaks_ = n;
    const double maxcond = 1000.0;
    std::vector<double> conds(n - 1);
    for (int i = 0; i < n - 1; ++i)
      conds[i] = std::pow(maxcond, static_cast<double>(i) / (n - 2));
    const auto u = detail::unif(n - 1, rseed_);
    std::vector<int> perm(n - 1);
    for (int i = 0; i < n - 1; ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&u](int a, int b) { return u[a] < u[b]; });
    peak_w_.resize(n);
    peak_w_[0] = 10.0;
    for (int i = 1; i < n; ++i)
      peak_w_[i] = 1.1 + 8.0 * static_cast<double>(i - 1) / (n - 2);
    cdiag_ = MatrixXd(n, d);
    {
      const double a0 = maxcond;
      const VectorXd l = detail::lambda_diag(a0, d);
      for (int j = 0; j < d; ++j)
        cdiag_(0, j) = l[j] * l[j] / std::sqrt(a0);
    }
    for (int i = 1; i < n; ++i) {
      const double a = conds[perm[i - 1]];
      const VectorXd l = detail::lambda_diag(a, d);
      for (int j = 0; j < d; ++j)
        cdiag_(i, j) = l[j] * l[j] / std::sqrt(a);
    }
    const double scale = id_.function_id == 21 ? 10.0 : 9.8;
    const auto up = detail::unif(static_cast<std::size_t>(d) * n, rseed_);
    peaks_ = MatrixXd(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j)
        peaks_(i, j) = scale * up[i * d + j] - scale / 2.0;
    peaks_.row(0) *= 0.8;
    xopt_ = peaks_.row(0).transpose();
  }

  double raw(const VectorXd& x) const {
    using namespace detail;
    const int d = id_.dimension;
    if (x.size() != d) throw std::invalid_argument("point dimension mismatch");
    switch (id_.function_id) {
      case 1: {
        const VectorXd z = x - xopt_;
        return z.squaredNorm();
      }
      case 2: {
        const VectorXd z = t_osz(x - xopt_);
        double s = 0.0;
        for (int i = 0; i < d; ++i)
          s += std::pow(10.0, 6.0 * i / (d - 1)) * z[i] * z[i];
        return s;
      }
      case 3: {
        const VectorXd z =
            lambda_diag(10.0, d).cwiseProduct(t_asy(t_osz(x - xopt_), 0.2));
        double c = 0.0;
        for (int i = 0; i < d; ++i) c += std::cos(2.0 * M_PI * z[i]);
        return 10.0 * (d - c) + z.squaredNorm();
      }
      case 4: {
        const VectorXd z = t_osz(x - xopt_);
        double c = 0.0, q = 0.0;
        for (int i = 0; i < d; ++i) {
          double s = std::pow(10.0, 0.5 * i / (d - 1));
          if (i % 2 == 0 && z[i] > 0.0) s *= 10.0;  // odd index, 1-based
          const double sz = s * z[i];
          c += std::cos(2.0 * M_PI * sz);
          q += sz * sz;
        }
        return 10.0 * (d - c) + q + 100.0 * f_pen(x);
      }
      case 5: {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          const double si =
              (xopt_[i] > 0 ? 1.0 : -1.0) * std::pow(10.0, static_cast<double>(i) / (d - 1));
          const double zi = x[i] * xopt_[i] < 25.0 ? x[i] : xopt_[i];
          s += 5.0 * std::abs(si) - si * zi;
        }
        return s;
      }
      case 6: {
        const VectorXd z =
            rot2_ * lambda_diag(10.0, d).cwiseProduct(rot_ * (x - xopt_));
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          const double si = z[i] * xopt_[i] > 0.0 ? 100.0 : 1.0;
          s += si * z[i] * si * z[i];
        }
        return std::pow(t_osz_scalar(s), 0.9);
      }
      case 7: {
        const VectorXd zhat = lambda_diag(10.0, d).cwiseProduct(rot_ * (x - xopt_));
        VectorXd zt(d);
        for (int i = 0; i < d; ++i)
          zt[i] = std::abs(zhat[i]) > 0.5 ? std::floor(0.5 + zhat[i])
                                          : std::floor(0.5 + 10.0 * zhat[i]) / 10.0;
        const VectorXd z = rot2_ * zt;
        double s = 0.0;
        for (int i = 0; i < d; ++i)
          s += std::pow(10.0, 2.0 * i / (d - 1)) * z[i] * z[i];
        return 0.1 * std::max(std::abs(zhat[0]) / 1e4, s) + f_pen(x);
      }
      case 8: {
        const double c = std::max(1.0, std::sqrt(d) / 8.0);
        const VectorXd z = c * (x - xopt_) + VectorXd::Ones(d);
        return rosenbrock(z);
      }
      case 9: {
        const double c = std::max(1.0, std::sqrt(d) / 8.0);
        const VectorXd z = c * (rot_ * x) + VectorXd::Constant(d, 0.5);
        return rosenbrock(z);
      }
      case 10: {
        const VectorXd z = t_osz(rot_ * (x - xopt_));
        double s = 0.0;
        for (int i = 0; i < d; ++i)
          s += std::pow(10.0, 6.0 * i / (d - 1)) * z[i] * z[i];
        return s;
      }
      case 11: {
        const VectorXd z = t_osz(rot_ * (x - xopt_));
        double s = 1e6 * z[0] * z[0];
        for (int i = 1; i < d; ++i) s += z[i] * z[i];
        return s;
      }
      case 12: {
        const VectorXd z = rot_ * t_asy(rot_ * (x - xopt_), 0.5);
        double s = z[0] * z[0];
        for (int i = 1; i < d; ++i) s += 1e6 * z[i] * z[i];
        return s;
      }
      case 13: {
        const VectorXd z =
            rot2_ * lambda_diag(10.0, d).cwiseProduct(rot_ * (x - xopt_));
        double tail = 0.0;
        for (int i = 1; i < d; ++i) tail += z[i] * z[i];
        return z[0] * z[0] + 100.0 * std::sqrt(tail);
      }
      case 14: {
        const VectorXd z = rot_ * (x - xopt_);
        double s = 0.0;
        for (int i = 0; i < d; ++i)
          s += std::pow(std::abs(z[i]), 2.0 + 4.0 * i / (d - 1));
        return std::sqrt(s);
      }
      case 15: {
        const VectorXd z =
            rot_ * lambda_diag(10.0, d).cwiseProduct(
                       rot2_ * t_asy(t_osz(rot_ * (x - xopt_)), 0.2));
        double c = 0.0;
        for (int i = 0; i < d; ++i) c += std::cos(2.0 * M_PI * z[i]);
        return 10.0 * (d - c) + z.squaredNorm();
      }
      case 16: {
        const VectorXd z =
            rot_ * lambda_diag(0.01, d).cwiseProduct(
                       rot2_ * t_osz(rot_ * (x - xopt_)));
        double f0 = 0.0;
        double mean = 0.0;
        for (int k = 0; k < 12; ++k)
          f0 += std::pow(0.5, k) * std::cos(M_PI * std::pow(3.0, k));
        for (int i = 0; i < d; ++i) {
          double inner = 0.0;
          for (int k = 0; k < 12; ++k)
            inner += std::pow(0.5, k) *
                     std::cos(2.0 * M_PI * std::pow(3.0, k) * (z[i] + 0.5));
          mean += inner;
        }
        mean /= d;
        return 10.0 * std::pow(mean - f0, 3) + 10.0 / d * f_pen(x);
      }
      case 17:
      case 18: {
        const double alpha = id_.function_id == 17 ? 10.0 : 1000.0;
        const VectorXd z = lambda_diag(alpha, d).cwiseProduct(
            rot2_ * t_asy(rot_ * (x - xopt_), 0.5));
        double m = 0.0;
        for (int i = 0; i + 1 < d; ++i) {
          const double s = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
          const double sn = std::sin(50.0 * std::pow(s, 0.2));
          m += std::sqrt(s) * (1.0 + sn * sn);
        }
        m /= d - 1;
        return m * m + 10.0 * f_pen(x);
      }
      case 19: {
        const double c = std::max(1.0, std::sqrt(d) / 8.0);
        const VectorXd z = c * (rot_ * x) + VectorXd::Constant(d, 0.5);
        double sum = 0.0;
        for (int i = 0; i + 1 < d; ++i) {
          const double a = z[i] * z[i] - z[i + 1];
          const double s = 100.0 * a * a + (z[i] - 1.0) * (z[i] - 1.0);
          sum += s / 4000.0 - std::cos(s);
        }
        return 10.0 / (d - 1) * sum + 10.0;
      }
      case 20: {
        VectorXd xhat(d), zhat(d);
        for (int i = 0; i < d; ++i)
          xhat[i] = 2.0 * (xopt_[i] > 0 ? 1.0 : -1.0) * x[i];
        zhat[0] = xhat[0];
        for (int i = 1; i < d; ++i)
          zhat[i] = xhat[i] + 0.25 * (xhat[i - 1] - 2.0 * std::abs(xopt_[i - 1]));
        const VectorXd l = lambda_diag(10.0, d);
        VectorXd z(d);
        for (int i = 0; i < d; ++i)
          z[i] = 100.0 * (l[i] * (zhat[i] - 2.0 * std::abs(xopt_[i])) +
                          2.0 * std::abs(xopt_[i]));
        double s = 0.0;
        for (int i = 0; i < d; ++i)
          s += z[i] * std::sin(std::sqrt(std::abs(z[i])));
        return -s / (100.0 * d) + 4.189828872724339 + 100.0 * f_pen(z / 100.0);
      }
      case 21:
      case 22: {
        double best = 0.0;
        for (int i = 0; i < npeaks_; ++i) {
          const VectorXd diff = rot_ * (x - peaks_.row(i).transpose());
          double e = 0.0;
          for (int j = 0; j < d; ++j) e += diff[j] * cdiag_(i, j) * diff[j];
          best = std::max(best, peak_w_[i] * std::exp(-e / (2.0 * d)));
        }
        const double t = t_osz_scalar(10.0 - best);
        return t * t + f_pen(x);
      }
      case 23: {
        const VectorXd z =
            rot2_ * lambda_diag(100.0, d).cwiseProduct(rot_ * (x - xopt_));
        double prod = 1.0;
        for (int i = 0; i < d; ++i) {
          double term = 0.0;
          double p2 = 1.0;
          for (int j = 1; j <= 32; ++j) {
            p2 *= 2.0;
            const double v = p2 * z[i];
            term += std::abs(v - std::floor(v + 0.5)) / p2;
          }
          prod *= std::pow(1.0 + (i + 1) * term, 10.0 / std::pow(d, 1.2));
        }
        return 10.0 / (d * d) * prod - 10.0 / (d * d) + f_pen(x);
      }
      case 24: {
        const double mu0 = 2.5;
        const double s = 1.0 - 1.0 / (2.0 * std::sqrt(d + 20.0) - 8.2);
        const double mu1 = -std::sqrt((mu0 * mu0 - 1.0) / s);
        VectorXd xhat(d);
        for (int i = 0; i < d; ++i)
          xhat[i] = 2.0 * (xopt_[i] > 0 ? 1.0 : -1.0) * x[i];
        const VectorXd z =
            rot2_ * lambda_diag(100.0, d).cwiseProduct(
                        rot_ * (xhat - VectorXd::Constant(d, mu0)));
        double t1 = 0.0, t2 = 0.0, c = 0.0;
        for (int i = 0; i < d; ++i) {
          t1 += (xhat[i] - mu0) * (xhat[i] - mu0);
          t2 += (xhat[i] - mu1) * (xhat[i] - mu1);
          c += std::cos(2.0 * M_PI * z[i]);
        }
        return std::min(t1, d + s * t2) + 10.0 * (d - c) + 1e4 * f_pen(x);
      }
    }
    throw std::logic_error("unreachable function id");
  }

  static double rosenbrock(const VectorXd& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
      const double a = z[i] * z[i] - z[i + 1];
      s += 100.0 * a * a + (z[i] - 1.0) * (z[i] - 1.0);
    }
    return s;
  }

  ProblemId id_;
  long rseed_ = 0;
  double fopt_ = 0.0;
  VectorXd xopt_;
  MatrixXd rot_;   // R
  MatrixXd rot2_;  // Q
  // Gallagher peak data (f21/f22 only)
  int npeaks_ = 0;
  MatrixXd peaks_;
  MatrixXd cdiag_;
  std::vector<double> peak_w_;
};

inline ProblemInstance instantiate(ProblemId id) { return ProblemInstance(id); }

}  // namespace trajas::bbob
