#include "cdtrade/calibration.hpp"

#include "cdtrade/error.hpp"
#include "cdtrade/parallel.hpp"
#include "cdtrade/shot_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cdtrade {

namespace {

constexpr double kAngleTol = 1e-9;

bool all_errors_positive(const CdScan& scan) {
  return std::all_of(scan.points.begin(), scan.points.end(),
                     [](const CdPoint& p) { return p.c_err > 0.0 && p.d_err > 0.0; });
}

void fill_full(DeviceCharacter& ch, double target_strength) {
  if (!(target_strength > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "target strength must be positive");
  }
  const double sharp = ch.strength_product / target_strength;
  const double shear = ch.shear_term / target_strength;
  const double squeeze = ch.squeeze_term / target_strength;
  const double bias = (1.0 - squeeze) * shear;
  const double u_plus = (1.0 - squeeze) + shear;
  ch.identifiability = Identifiability::Full;
  ch.target_strength = target_strength;
  ch.probe_sharpness = sharp;
  ch.shear = shear;
  ch.squeeze = squeeze;
  ch.probe_bias = bias;
  ch.consistency = std::abs(sharp * sharp - ((1.0 + bias) * (1.0 + bias) - u_plus * u_plus));
  if (std::abs(bias) > 1e-9) ch.target_bias = ch.center_shift / bias;
}

double safe_ratio(double num, double den) {
  return den != 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

CircleFit fit_circle_sharp_probe(const CdScan& scan) {
  const std::size_t n = scan.points.size();
  if (n < 2) throw Error(ErrorCode::InsufficientPoints, "circle fit needs at least 2 points");
  const bool weighted = all_errors_positive(scan);

  std::vector<double> r2(n), w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = scan.points[i];
    r2[i] = p.c * p.c + p.d * p.d;
    if (weighted) {
      const double var = 4.0 * (p.c * p.c * p.c_err * p.c_err + p.d * p.d * p.d_err * p.d_err);
      w[i] = var > 0.0 ? 1.0 / var : 0.0;
    }
  }
  double wsum = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum += w[i];
    mean += w[i] * r2[i];
  }
  if (wsum <= 0.0) throw Error(ErrorCode::InsufficientPoints, "no usable points");
  mean /= wsum;

  CircleFit fit;
  fit.strength = std::sqrt(std::max(mean, 0.0));
  double mean_err = 0.0;
  if (weighted) {
    mean_err = 1.0 / std::sqrt(wsum);
  } else {
    double ss = 0.0;
    for (double v : r2) ss += (v - mean) * (v - mean);
    mean_err = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  fit.strength_err = fit.strength > 0.0 ? mean_err / (2.0 * fit.strength) : std::sqrt(mean_err);
  double res = 0.0;
  for (double v : r2) {
    const double d = std::sqrt(v) - fit.strength;
    res += d * d;
  }
  fit.residual_rms = std::sqrt(res / static_cast<double>(n));
  return fit;
}

DeviceCharacter fit_ellipse_known_theta(const CdScan& scan, const FitOptions& options) {
  const std::size_t n = scan.points.size();
  if (n < 4) throw Error(ErrorCode::InsufficientPoints, "known-theta fit needs at least 4 points");
  std::vector<double> angles;
  for (const auto& p : scan.points) {
    if (!p.theta) throw Error(ErrorCode::InvalidArgument, "every point needs its theta");
    angles.push_back(*p.theta);
  }
  std::sort(angles.begin(), angles.end());
  std::size_t distinct = angles.empty() ? 0 : 1;
  for (std::size_t i = 1; i < angles.size(); ++i) {
    if (angles[i] - angles[i - 1] > kAngleTol) ++distinct;
  }
  if (distinct < 3) throw Error(ErrorCode::RankDeficient, "need at least 3 distinct angles");

  const bool weighted = all_errors_positive(scan);
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd x(rows, 3);
  Eigen::VectorXd yc(rows);
  double sd_num = 0.0, sd_den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = scan.points[i];
    const double t = *p.theta;
    const double wc = weighted ? 1.0 / p.c_err : 1.0;
    const double wd = weighted ? 1.0 / (p.d_err * p.d_err) : 1.0;
    const auto r = static_cast<Eigen::Index>(i);
    x.row(r) << wc, wc * std::cos(t), wc * std::sin(t);
    yc[r] = wc * p.c;
    sd_num += wd * std::sin(t) * p.d;
    sd_den += wd * std::sin(t) * std::sin(t);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw Error(ErrorCode::RankDeficient, "theta grid is degenerate");
  if (sd_den <= 1e-14) throw Error(ErrorCode::RankDeficient, "no point with sin(theta) != 0");
  const Eigen::Vector3d coef = qr.solve(yc);

  DeviceCharacter ch;
  ch.center_shift = coef[0];
  ch.strength_product = coef[1];
  ch.shear_term = coef[2];
  ch.squeeze_term = sd_num / sd_den;
  ch.shear_ratio = safe_ratio(ch.shear_term, ch.squeeze_term);

  double res = 0.0;
  for (const auto& p : scan.points) {
    const double t = *p.theta;
    const double rc = p.c - (ch.center_shift + ch.strength_product * std::cos(t) +
                             ch.shear_term * std::sin(t));
    const double rd = p.d - ch.squeeze_term * std::sin(t);
    res += rc * rc + rd * rd;
  }
  ch.residual_rms = std::sqrt(res / static_cast<double>(n));
  if (options.target_strength) fill_full(ch, *options.target_strength);
  return ch;
}

DeviceCharacter fit_ellipse_unknown_theta(const CdScan& scan) {
  const std::size_t n = scan.points.size();
  if (n < 6) throw Error(ErrorCode::InsufficientPoints, "conic fit needs at least 6 points");

  // Isotropic normalization keeps the scatter matrices well conditioned.
  double mx = 0.0, my = 0.0;
  for (const auto& p : scan.points) {
    mx += p.c;
    my += p.d;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double spread = 0.0;
  for (const auto& p : scan.points) spread += (p.c - mx) * (p.c - mx) + (p.d - my) * (p.d - my);
  spread = std::sqrt(spread / static_cast<double>(n));
  if (spread <= 0.0) throw Error(ErrorCode::NotAnEllipse, "all points coincide");

  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd quad(rows, 3), lin(rows, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (scan.points[i].c - mx) / spread;
    const double v = (scan.points[i].d - my) / spread;
    const auto r = static_cast<Eigen::Index>(i);
    quad.row(r) << u * u, u * v, v * v;
    lin.row(r) << u, v, 1.0;
  }
  const Eigen::Matrix3d s1 = quad.transpose() * quad;
  const Eigen::Matrix3d s2 = quad.transpose() * lin;
  const Eigen::Matrix3d s3 = lin.transpose() * lin;
  Eigen::FullPivLU<Eigen::Matrix3d> s3_lu(s3);
  if (!s3_lu.isInvertible()) throw Error(ErrorCode::NotAnEllipse, "points are collinear");
  const Eigen::Matrix3d t = -s3_lu.solve(s2.transpose());
  const Eigen::Matrix3d m = s1 + s2 * t;
  Eigen::Matrix3d reduced;
  reduced.row(0) = m.row(2) / 2.0;
  reduced.row(1) = -m.row(1);
  reduced.row(2) = m.row(0) / 2.0;

  Eigen::EigenSolver<Eigen::Matrix3d> eig(reduced);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::NotAnEllipse, "eigensolver failed");
  std::optional<Eigen::Matrix<double, 6, 1>> best;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3cd vc = eig.eigenvectors().col(k);
    if (vc.imag().norm() > 1e-9 * std::max(1.0, vc.real().norm())) continue;
    Eigen::Vector3d a1 = vc.real();
    if (4.0 * a1[0] * a1[2] - a1[1] * a1[1] <= 0.0) continue;
    a1.normalize();
    const Eigen::Vector3d a2 = t * a1;
    const double residual = (quad * a1 + lin * a2).norm();
    if (residual < best_residual) {
      best_residual = residual;
      best = (Eigen::Matrix<double, 6, 1>() << a1, a2).finished();
    }
  }
  if (!best) throw Error(ErrorCode::NotAnEllipse, "no ellipse-definite conic");

  const auto& a = *best;
  Eigen::Matrix3d conic;
  conic << a[0], a[1] / 2, a[3] / 2,
           a[1] / 2, a[2], a[4] / 2,
           a[3] / 2, a[4] / 2, a[5];
  Eigen::Matrix3d h;
  h << 1.0 / spread, 0.0, -mx / spread,
       0.0, 1.0 / spread, -my / spread,
       0.0, 0.0, 1.0;
  const Eigen::Matrix3d q = h.transpose() * conic * h;
  const double qa = q(0, 0), qb = 2.0 * q(0, 1), qc = q(1, 1);
  const double qd = 2.0 * q(0, 2), qe = 2.0 * q(1, 2), qf = q(2, 2);

  const double disc = 4.0 * qa * qc - qb * qb;
  if (disc <= 0.0) throw Error(ErrorCode::NotAnEllipse, "conic discriminant is not elliptic");
  Eigen::Matrix2d grad;
  grad << 2.0 * qa, qb, qb, 2.0 * qc;
  const Eigen::Vector2d center = grad.fullPivLu().solve(Eigen::Vector2d(-qd, -qe));
  const double f_center = qf + 0.5 * (qd * center[0] + qe * center[1]);
  if (!(qa * -f_center > 0.0)) throw Error(ErrorCode::NotAnEllipse, "imaginary ellipse");

  DeviceCharacter ch;
  ch.center_shift = center[0];
  ch.center_offset_d = center[1];
  ch.strength_product = std::sqrt(-f_center / qa);
  ch.squeeze_term = std::sqrt(4.0 * qa * -f_center / disc);
  ch.shear_ratio = -qb / (2.0 * qa);
  ch.shear_term = ch.shear_ratio * ch.squeeze_term;

  double res = 0.0;
  for (const auto& p : scan.points) {
    const double dv = p.d - ch.center_offset_d;
    const double x = (p.c - ch.center_shift - ch.shear_ratio * dv) / ch.strength_product;
    const double y = dv / ch.squeeze_term;
    const double r = x * x + y * y - 1.0;
    res += r * r;
  }
  ch.residual_rms = std::sqrt(res / static_cast<double>(n));
  return ch;
}

std::vector<double> character_vector(const DeviceCharacter& ch) {
  return {ch.center_shift, ch.strength_product, ch.shear_term, ch.squeeze_term, ch.shear_ratio};
}

BootstrapResult bootstrap(const CdScan& scan, FitMethod method, const FitOptions& options,
                          std::size_t resamples, std::uint64_t seed) {
  const std::size_t n = scan.points.size();
  if (n == 0) throw Error(ErrorCode::InsufficientPoints, "empty scan");
  const auto fit = [&](const CdScan& s) -> std::vector<double> {
    switch (method) {
      case FitMethod::Circle: return {fit_circle_sharp_probe(s).strength};
      case FitMethod::KnownTheta: return character_vector(fit_ellipse_known_theta(s, options));
      case FitMethod::UnknownTheta: return character_vector(fit_ellipse_unknown_theta(s));
    }
    return {};
  };

  std::vector<std::optional<std::vector<double>>> draws(resamples);
  parallel_for(resamples, [&](std::size_t k) {
    std::mt19937_64 engine(stream_seed(seed, k));
    CdScan resampled;
    resampled.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      resampled.points.push_back(scan.points[std::min(n - 1, static_cast<std::size_t>(u * n))]);
    }
    try {
      draws[k] = fit(resampled);
    } catch (const Error&) {
      // degenerate resample (too few distinct points); counted below
    }
  });

  BootstrapResult out;
  std::vector<std::vector<double>> ok;
  for (auto& d : draws) {
    if (d) ok.push_back(std::move(*d));
  }
  out.used = ok.size();
  out.failed = resamples - ok.size();
  if (ok.size() < 2) return out;
  const std::size_t dims = ok.front().size();
  out.stddev.assign(dims, 0.0);
  for (std::size_t j = 0; j < dims; ++j) {
    double mean = 0.0;
    for (const auto& v : ok) mean += v[j];
    mean /= static_cast<double>(ok.size());
    double ss = 0.0;
    for (const auto& v : ok) ss += (v[j] - mean) * (v[j] - mean);
    out.stddev[j] = std::sqrt(ss / static_cast<double>(ok.size() - 1));
  }
  return out;
}

DetectorEstimate estimate_detector(double d1, double c2, double d1_err, double c2_err) {
  if (d1_err < 0.0 || c2_err < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "errors must be non-negative");
  }
  DetectorEstimate est;
  est.noise = estimate_noise(d1, c2);
  const double dark = 0.5 * (c2 + d1 + 1.0);
  // eta = d1 / dark, nu = -ln(dark), d(dark)/d(d1) = d(dark)/d(c2) = 1/2
  const double deta_dd1 = 1.0 / dark - d1 / (2.0 * dark * dark);
  const double deta_dc2 = -d1 / (2.0 * dark * dark);
  const double dnu = -1.0 / (2.0 * dark);
  est.eta_err = std::hypot(deta_dd1 * d1_err, deta_dc2 * c2_err);
  est.nu_err = std::hypot(dnu * d1_err, dnu * c2_err);
  return est;
}

}  // namespace cdtrade
