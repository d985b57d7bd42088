// Landscape features computed from an evaluated sample set: distribution,
// meta-model, dispersion, information content, nearest-better clustering and
// PCA groups. All features are deterministic functions of (X, y).
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajas {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SampleSet {
  MatrixXd X;  // n x D
  VectorXd y;  // n
};

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  double at(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return values[i];
    throw std::out_of_range("no feature named " + name);
  }
};

inline const std::vector<std::string>& feature_schema() {
  static const std::vector<std::string> schema = [] {
    std::vector<std::string> s = {
        "ela_distr.skewness",
        "ela_distr.kurtosis",
        "ela_distr.number_of_peaks",
        "ela_meta.lin_simple.adj_r2",
        "ela_meta.lin_simple.intercept",
        "ela_meta.lin_simple.coef.min",
        "ela_meta.lin_simple.coef.max",
        "ela_meta.lin_simple.coef.max_by_min",
        "ela_meta.quad_simple.adj_r2",
        "ela_meta.quad_simple.cond",
    };
    for (const char* stat : {"ratio_mean", "ratio_median", "diff_mean",
                             "diff_median"})
      for (const char* q : {"02", "05", "10", "25"})
        s.push_back(std::string("disp.") + stat + "_" + q);
    for (const char* n : {"h_max", "eps_s", "eps_max", "eps_ratio", "m0"})
      s.push_back(std::string("ic.") + n);
    s.insert(s.end(), {"nbc.nn_nb.sd_ratio", "nbc.nn_nb.mean_ratio",
                       "nbc.nn_nb.cor", "nbc.dist_ratio.coeff_var",
                       "nbc.nb_fitness.cor"});
    for (const char* n :
         {"expl_var.cov_x", "expl_var.cor_x", "expl_var.cov_init",
          "expl_var.cor_init", "expl_var_PC1.cov_x", "expl_var_PC1.cor_x",
          "expl_var_PC1.cov_init", "expl_var_PC1.cor_init"})
      s.push_back(std::string("pca.") + n);
    return s;
  }();
  return schema;
}

namespace feat_detail {

inline double mean(const VectorXd& v) { return v.mean(); }

inline double sample_sd(const VectorXd& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / (v.size() - 1));
}

inline double pearson(const VectorXd& a, const VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  const double num = ((a.array() - ma) * (b.array() - mb)).sum();
  const double den = std::sqrt((a.array() - ma).square().sum() *
                               (b.array() - mb).square().sum());
  return num / den;
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - lo;
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// least squares with intercept; returns (intercept, coefs, adj_r2)
struct OlsFit {
  double intercept;
  VectorXd coefs;
  double adj_r2;
};

inline OlsFit ols(const MatrixXd& X, const VectorXd& y) {
  const Eigen::Index n = X.rows(), p = X.cols();
  MatrixXd A(n, p + 1);
  A.col(0).setOnes();
  A.rightCols(p) = X;
  const VectorXd beta = A.colPivHouseholderQr().solve(y);
  const double ss_res = (y - A * beta).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  OlsFit fit;
  fit.intercept = beta[0];
  fit.coefs = beta.tail(p);
  fit.adj_r2 =
      1.0 - (1.0 - r2) * (static_cast<double>(n) - 1.0) / (n - p - 1.0);
  return fit;
}

inline MatrixXd pairwise_distances(const MatrixXd& X) {
  const Eigen::Index n = X.rows();
  MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (X.row(i) - X.row(j)).norm();
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

// number of components (descending eigenvalues) needed to reach 90% variance
inline double expl_var_fraction(const VectorXd& eigvals_desc) {
  const double total = eigvals_desc.sum();
  double cum = 0.0;
  for (Eigen::Index i = 0; i < eigvals_desc.size(); ++i) {
    cum += eigvals_desc[i];
    if (cum / total >= 0.9) return static_cast<double>(i + 1) / eigvals_desc.size();
  }
  return 1.0;
}

inline VectorXd eigvals_desc(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  VectorXd ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
  return ev;
}

inline MatrixXd covariance(const MatrixXd& X) {
  const MatrixXd centered = X.rowwise() - X.colwise().mean();
  return centered.transpose() * centered / (X.rows() - 1.0);
}

inline MatrixXd correlation(const MatrixXd& X) {
  MatrixXd c = covariance(X);
  VectorXd sd = c.diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const double den = sd[i] * sd[j];
      c(i, j) = den > 0 ? c(i, j) / den : (i == j ? 1.0 : 0.0);
    }
  return c;
}

}  // namespace feat_detail

inline FeatureVector compute_features(const SampleSet& s) {
  using namespace feat_detail;
  const Eigen::Index n = s.X.rows();
  const Eigen::Index d = s.X.cols();
  if (s.y.size() != n) throw std::invalid_argument("X/y row mismatch");
  if (n < d + 2)
    throw std::invalid_argument("need at least D+2 samples for features");
  if (!s.X.allFinite() || !s.y.allFinite())
    throw std::invalid_argument("sample set contains non-finite values");

  std::map<std::string, double> f;
  const VectorXd& y = s.y;

  // --- ela_distr
  {
    const double m = y.mean();
    const double m2 = (y.array() - m).square().mean();
    const double m3 = (y.array() - m).cube().mean();
    const double m4 = (y.array() - m).pow(4).mean();
    f["ela_distr.skewness"] = m3 / std::pow(m2, 1.5);
    f["ela_distr.kurtosis"] = m4 / (m2 * m2) - 3.0;

    // kernel density peak count, Silverman bandwidth
    std::vector<double> ys(y.data(), y.data() + n);
    const double sd = sample_sd(y);
    const double iqr = quantile(ys, 0.75) - quantile(ys, 0.25);
    const double spread = std::min(sd, iqr / 1.34);
    const double bw = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
    if (bw > 0) {
      const int grid_n = 512;
      const double lo = y.minCoeff() - 3.0 * bw;
      const double hi = y.maxCoeff() + 3.0 * bw;
      std::vector<double> dens(grid_n, 0.0);
      for (int g = 0; g < grid_n; ++g) {
        const double t = lo + (hi - lo) * g / (grid_n - 1);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double u = (t - y[i]) / bw;
          acc += std::exp(-0.5 * u * u);
        }
        dens[g] = acc;
      }
      int peaks = 0;
      for (int g = 1; g + 1 < grid_n; ++g)
        if (dens[g] > dens[g - 1] && dens[g] > dens[g + 1]) ++peaks;
      f["ela_distr.number_of_peaks"] = std::max(peaks, 1);
    } else {
      f["ela_distr.number_of_peaks"] = 1.0;
    }
  }

  // --- ela_meta
  {
    // coefficient ratios are meaningless when the fitted coefficients are
    // numerical noise; such fits report a ratio of 1
    const double coef_tol = 1e-10 * std::max(1.0, y.cwiseAbs().maxCoeff());
    const OlsFit lin = ols(s.X, y);
    const VectorXd abs_coef = lin.coefs.cwiseAbs();
    f["ela_meta.lin_simple.adj_r2"] = lin.adj_r2;
    f["ela_meta.lin_simple.intercept"] = lin.intercept;
    f["ela_meta.lin_simple.coef.min"] = abs_coef.minCoeff();
    f["ela_meta.lin_simple.coef.max"] = abs_coef.maxCoeff();
    f["ela_meta.lin_simple.coef.max_by_min"] =
        abs_coef.maxCoeff() < coef_tol
            ? 1.0
            : abs_coef.maxCoeff() / abs_coef.minCoeff();

    MatrixXd Xq(n, 2 * d);
    Xq.leftCols(d) = s.X;
    Xq.rightCols(d) = s.X.array().square();
    const OlsFit quad = ols(Xq, y);
    const VectorXd qabs = quad.coefs.tail(d).cwiseAbs();
    f["ela_meta.quad_simple.adj_r2"] = quad.adj_r2;
    f["ela_meta.quad_simple.cond"] =
        qabs.maxCoeff() < coef_tol ? 1.0 : qabs.maxCoeff() / qabs.minCoeff();
  }

  const MatrixXd dist = pairwise_distances(s.X);

  // --- disp
  {
    std::vector<double> all_d;
    all_d.reserve(n * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) all_d.push_back(dist(i, j));
    const double all_mean =
        std::accumulate(all_d.begin(), all_d.end(), 0.0) / all_d.size();
    const double all_median = quantile(all_d, 0.5);

    std::vector<double> ys(y.data(), y.data() + n);
    for (const auto& [q, tag] :
         std::vector<std::pair<double, std::string>>{
             {0.02, "02"}, {0.05, "05"}, {0.10, "10"}, {0.25, "25"}}) {
      const double thr = quantile(ys, q);
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < n; ++i)
        if (y[i] <= thr) idx.push_back(i);
      std::vector<double> sub;
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
          sub.push_back(dist(idx[a], idx[b]));
      double sub_mean = all_mean, sub_median = all_median;
      if (!sub.empty()) {
        sub_mean = std::accumulate(sub.begin(), sub.end(), 0.0) / sub.size();
        sub_median = quantile(sub, 0.5);
      }
      f["disp.ratio_mean_" + tag] = sub_mean / all_mean;
      f["disp.ratio_median_" + tag] = sub_median / all_median;
      f["disp.diff_mean_" + tag] = sub_mean - all_mean;
      f["disp.diff_median_" + tag] = sub_median - all_median;
    }
  }

  // --- ic (information content over a nearest-neighbor tour)
  {
    std::vector<Eigen::Index> tour;
    std::vector<bool> used(n, false);
    Eigen::Index cur = 0;
    used[0] = true;
    tour.push_back(0);
    for (Eigen::Index step = 1; step < n; ++step) {
      Eigen::Index best = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (used[j]) continue;
        if (best < 0 || dist(cur, j) < dist(cur, best)) best = j;
      }
      used[best] = true;
      tour.push_back(best);
      cur = best;
    }
    std::vector<double> slope(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double dd = dist(tour[i], tour[i + 1]);
      slope[i] = dd > 0 ? (y[tour[i + 1]] - y[tour[i]]) / dd : 0.0;
    }
    double max_slope = 1e-5;
    for (double v : slope) max_slope = std::max(max_slope, std::abs(v));

    const int grid_n = 1000;
    std::vector<double> eps_grid;
    eps_grid.push_back(0.0);
    for (int g = 0; g < grid_n; ++g)
      eps_grid.push_back(std::pow(
          10.0, std::log10(1e-5) +
                    (std::log10(max_slope) - std::log10(1e-5)) * g /
                        (grid_n - 1)));

    auto entropy = [&](double eps) {
      // symbol pairs (a,b), a != b, over {-1,0,1}; log base 6
      double counts[3][3] = {};
      long total = 0;
      int prev = -2;
      for (std::size_t i = 0; i < slope.size(); ++i) {
        const int sym = slope[i] > eps ? 1 : (slope[i] < -eps ? -1 : 0);
        if (prev != -2) {
          ++counts[prev + 1][sym + 1];
          ++total;
        }
        prev = sym;
      }
      double h = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          if (a == b || counts[a][b] == 0) continue;
          const double p = counts[a][b] / static_cast<double>(total);
          h -= p * std::log(p) / std::log(6.0);
        }
      return h;
    };
    auto partial_info = [&](double eps) {
      // symbols with zeros and consecutive repeats removed
      long m = 0;
      int prev = 0;
      for (std::size_t i = 0; i < slope.size(); ++i) {
        const int sym = slope[i] > eps ? 1 : (slope[i] < -eps ? -1 : 0);
        if (sym != 0 && sym != prev) {
          ++m;
          prev = sym;
        }
      }
      return static_cast<double>(m) / slope.size();
    };

    double h_max = 0.0, eps_max = eps_grid.back();
    for (double e : eps_grid) {
      const double h = entropy(e);
      if (h > h_max + 1e-15 && e > 0.0) {
        h_max = h;
        eps_max = e;
      }
    }
    h_max = std::max(h_max, entropy(0.0));
    const double m0 = partial_info(0.0);
    double eps_s = eps_grid.back(), eps_ratio = eps_grid.back();
    for (double e : eps_grid) {
      if (e <= 0.0) continue;
      if (entropy(e) < 0.05) {
        eps_s = e;
        break;
      }
    }
    for (double e : eps_grid) {
      if (e <= 0.0) continue;
      if (partial_info(e) < 0.5 * m0) {
        eps_ratio = e;
        break;
      }
    }
    f["ic.h_max"] = h_max;
    f["ic.eps_s"] = std::log10(eps_s);
    f["ic.eps_max"] = std::log10(eps_max);
    f["ic.eps_ratio"] = std::log10(eps_ratio);
    f["ic.m0"] = m0;
  }

  // --- nbc
  {
    VectorXd nn(n), nb(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double dn = std::numeric_limits<double>::infinity();
      double db = std::numeric_limits<double>::infinity();
      double dmax = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        dn = std::min(dn, dist(i, j));
        dmax = std::max(dmax, dist(i, j));
        if (y[j] < y[i]) db = std::min(db, dist(i, j));
      }
      nn[i] = dn;
      // points with no strictly better neighbor take the farthest distance
      nb[i] = std::isfinite(db) ? db : dmax;
    }
    const VectorXd ratio = nn.cwiseQuotient(nb.cwiseMax(1e-300));
    f["nbc.nn_nb.sd_ratio"] = sample_sd(nn) / sample_sd(nb);
    f["nbc.nn_nb.mean_ratio"] = nn.mean() / nb.mean();
    f["nbc.nn_nb.cor"] = pearson(nn, nb);
    f["nbc.dist_ratio.coeff_var"] = sample_sd(ratio) / ratio.mean();
    f["nbc.nb_fitness.cor"] = pearson(nb, y);
  }

  // --- pca
  {
    MatrixXd Xy(n, d + 1);
    Xy.leftCols(d) = s.X;
    Xy.col(d) = y;
    const VectorXd ev_cov_x = eigvals_desc(covariance(s.X));
    const VectorXd ev_cor_x = eigvals_desc(correlation(s.X));
    const VectorXd ev_cov_i = eigvals_desc(covariance(Xy));
    const VectorXd ev_cor_i = eigvals_desc(correlation(Xy));
    f["pca.expl_var.cov_x"] = expl_var_fraction(ev_cov_x);
    f["pca.expl_var.cor_x"] = expl_var_fraction(ev_cor_x);
    f["pca.expl_var.cov_init"] = expl_var_fraction(ev_cov_i);
    f["pca.expl_var.cor_init"] = expl_var_fraction(ev_cor_i);
    f["pca.expl_var_PC1.cov_x"] = ev_cov_x[0] / ev_cov_x.sum();
    f["pca.expl_var_PC1.cor_x"] = ev_cor_x[0] / ev_cor_x.sum();
    f["pca.expl_var_PC1.cov_init"] = ev_cov_i[0] / ev_cov_i.sum();
    f["pca.expl_var_PC1.cor_init"] = ev_cor_i[0] / ev_cor_i.sum();
  }

  // imputation: ratio-like features default to 1, everything else to 0
  auto is_ratio = [](const std::string& name) {
    return name.find("ratio") != std::string::npos ||
           name.find("max_by_min") != std::string::npos ||
           name.find("cond") != std::string::npos;
  };
  FeatureVector out;
  out.names = feature_schema();
  out.values.reserve(out.names.size());
  for (const auto& name : out.names) {
    double v = f.at(name);
    if (!std::isfinite(v)) v = is_ratio(name) ? 1.0 : 0.0;
    out.values.push_back(v);
  }
  return out;
}

}  // namespace trajas
