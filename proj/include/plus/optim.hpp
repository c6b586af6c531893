#pragma once
// Derivative-free and finite-difference optimizers used by the identification
// and trend-search fits: a compact Nelder-Mead simplex for 1-3 parameter
// scalar objectives, and a box-projected Levenberg-Marquardt least-squares
// routine with forward-difference Jacobians and monotone acceptance.

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

namespace plus::num {

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
// Stops when the simplex's value spread falls below ftol (absolute).
template <class F>
SimplexResult nelder_mead(F&& f, const std::vector<double>& x0, double step, double ftol,
                          int max_iter) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start");
  struct Vertex {
    std::vector<double> x;
    double f;
  };
  std::vector<Vertex> s;
  s.reserve(n + 1);
  s.push_back({x0, f(x0)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = x0;
    v[i] += step;
    s.push_back({v, f(v)});
  }
  auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };

  SimplexResult out;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    std::sort(s.begin(), s.end(), by_f);
    if (s.back().f - s.front().f < ftol) {
      out.converged = true;
      break;
    }
    std::vector<double> c(n, 0.0);  // centroid of all but worst
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[j] += s[i].x[j] / static_cast<double>(n);
    auto blend = [&](double t) {
      std::vector<double> v(n);
      for (std::size_t j = 0; j < n; ++j) v[j] = c[j] + t * (s.back().x[j] - c[j]);
      return v;
    };
    const std::vector<double> xr = blend(-1.0);
    const double fr = f(xr);
    if (fr < s.front().f) {
      const std::vector<double> xe = blend(-2.0);
      const double fe = f(xe);
      if (fe < fr) s.back() = {xe, fe};
      else s.back() = {xr, fr};
    } else if (fr < s[n - 1].f) {
      s.back() = {xr, fr};
    } else {
      const std::vector<double> xc = blend(fr < s.back().f ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, s.back().f)) {
        s.back() = {xc, fc};
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            s[i].x[j] = s[0].x[j] + 0.5 * (s[i].x[j] - s[0].x[j]);
          s[i].f = f(s[i].x);
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), by_f);
  out.x = s.front().x;
  out.f = s.front().f;
  return out;
}

struct LeastSquaresOptions {
  int max_iterations = 60;
  double fd_step = 1e-4;        // forward-difference step per parameter
  double lambda0 = 1e-3;        // initial damping
  double cost_tol = 1e-12;      // relative cost improvement to keep going
  double step_tol = 1e-10;      // infinity-norm of the accepted step
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double cost = 0.0;            // 0.5 * ||r||^2
  int iterations = 0;
  bool converged = false;       // false means stagnation: best-so-far returned
};

// Box-projected Levenberg-Marquardt. The residual callback maps parameters to
// a residual vector; candidates are projected onto [lo, hi] before evaluation
// and only cost-decreasing steps are accepted, so the returned cost never
// exceeds the initialization's.
inline LeastSquaresResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
    const LeastSquaresOptions& opt = {}) {
  const auto n = x.size();
  if (lo.size() != n || hi.size() != n)
    throw std::invalid_argument("levenberg_marquardt: bound dimension mismatch");
  auto project = [&](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::clamp(v(i), lo(i), hi(i));
    return v;
  };
  x = project(std::move(x));
  Eigen::VectorXd r = residual(x);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opt.lambda0;

  LeastSquaresResult out;
  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    Eigen::MatrixXd j(r.size(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x;
      const double h = opt.fd_step * std::max(1.0, std::abs(x(i)));
      xp(i) = std::min(x(i) + h, hi(i));
      const double dh = xp(i) - x(i);
      if (dh == 0.0) {  // pinned at the upper bound: difference backwards
        xp(i) = x(i) - h;
        j.col(i) = (r - residual(xp)) / h;
      } else {
        j.col(i) = (residual(xp) - r) / dh;
      }
    }
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;

    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd m = jtj;
      m.diagonal().array() += lambda;
      const Eigen::VectorXd step = m.ldlt().solve(-g);
      const Eigen::VectorXd xc = project(x + step);
      const Eigen::VectorXd rc = residual(xc);
      const double cc = 0.5 * rc.squaredNorm();
      if (cc < cost) {
        const double rel = (cost - cc) / std::max(cost, 1e-300);
        const double moved = (xc - x).cwiseAbs().maxCoeff();
        x = xc;
        r = rc;
        cost = cc;
        lambda = std::max(lambda * 0.5, 1e-12);
        accepted = true;
        if (rel < opt.cost_tol || moved < opt.step_tol) {
          out.converged = true;
          out.x = x;
          out.cost = cost;
          return out;
        }
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;  // stagnation: no damping level improved the cost
  }
  out.x = x;
  out.cost = cost;
  return out;
}

}  // namespace plus::num
