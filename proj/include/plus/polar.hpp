#pragma once
// Rectangular (sigma, alpha) polar tables: CSV ingestion, bilinear
// interpolation, and generation by sampling a coefficient model.
//
// File schema (header required, any row order):
//   sigma,alpha_deg,CL,CD,Cm
// Alpha is stored in radians internally; the CSV carries degrees.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "plus/csv.hpp"
#include "plus/synthetic.hpp"

namespace plus::aero {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

class PolarTable {
 public:
  PolarTable(std::vector<double> sigma_axis, std::vector<double> alpha_axis,
             std::vector<double> cl, std::vector<double> cd, std::vector<double> cm)
      : sigma_(std::move(sigma_axis)), alpha_(std::move(alpha_axis)),
        cl_(std::move(cl)), cd_(std::move(cd)), cm_(std::move(cm)) {
    if (sigma_.size() < 2 || alpha_.size() < 2)
      throw std::invalid_argument("PolarTable: need at least 2 nodes per axis");
    const std::size_t n = sigma_.size() * alpha_.size();
    if (cl_.size() != n || cd_.size() != n || cm_.size() != n)
      throw std::invalid_argument("PolarTable: value arrays do not match the grid");
    for (std::size_t i = 1; i < sigma_.size(); ++i)
      if (!(sigma_[i] > sigma_[i - 1]))
        throw std::invalid_argument("PolarTable: sigma axis not strictly increasing");
    for (std::size_t j = 1; j < alpha_.size(); ++j)
      if (!(alpha_[j] > alpha_[j - 1]))
        throw std::invalid_argument("PolarTable: alpha axis not strictly increasing");
    if (sigma_.front() > 0.0 || sigma_.back() < 0.0)
      throw std::invalid_argument("PolarTable: sigma axis must bracket 0");
  }

  const std::vector<double>& sigma_axis() const { return sigma_; }
  const std::vector<double>& alpha_axis() const { return alpha_; }
  double value(std::size_t i, std::size_t j, int which) const {
    const std::size_t k = i * alpha_.size() + j;
    return which == 0 ? cl_[k] : which == 1 ? cd_[k] : cm_[k];
  }

  CoefficientSet interpolate(double sigma, double alpha) const {
    const auto [i, ts] = locate(sigma_, sigma, "sigma");
    const auto [j, ta] = locate(alpha_, alpha, "alpha");
    CoefficientSet out;
    out.CL = bilinear(cl_, i, j, ts, ta);
    out.CD = bilinear(cd_, i, j, ts, ta);
    out.Cm = bilinear(cm_, i, j, ts, ta);
    return out;
  }

 private:
  std::pair<std::size_t, double> locate(const std::vector<double>& axis, double v,
                                        const char* name) const {
    if (!std::isfinite(v) || v < axis.front() || v > axis.back())
      throw std::domain_error(std::string("PolarTable: ") + name + " = " + std::to_string(v) +
                              " outside [" + std::to_string(axis.front()) + ", " +
                              std::to_string(axis.back()) + "]");
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(axis.begin(), axis.end(), v) - axis.begin());
    i = std::clamp<std::size_t>(i, 1, axis.size() - 1) - 1;
    const double t = (v - axis[i]) / (axis[i + 1] - axis[i]);
    return {i, t};
  }

  double bilinear(const std::vector<double>& z, std::size_t i, std::size_t j, double ts,
                  double ta) const {
    const std::size_t w = alpha_.size();
    const double z00 = z[i * w + j], z01 = z[i * w + j + 1];
    const double z10 = z[(i + 1) * w + j], z11 = z[(i + 1) * w + j + 1];
    return (1 - ts) * ((1 - ta) * z00 + ta * z01) + ts * ((1 - ta) * z10 + ta * z11);
  }

  std::vector<double> sigma_, alpha_;
  std::vector<double> cl_, cd_, cm_;
};

inline PolarTable ingest_polar_table(std::istream& in, const std::string& origin = "<stream>") {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("polar table " + origin + ": empty input");
  {
    auto header = io::split_csv_line(line);
    const std::vector<std::string> want{"sigma", "alpha_deg", "CL", "CD", "Cm"};
    if (std::vector<std::string>(header.begin(), header.end()) != want)
      throw std::runtime_error("polar table " + origin +
                               ": header must be 'sigma,alpha_deg,CL,CD,Cm'");
  }
  struct Cell { double cl, cd, cm; int line; };
  std::map<std::pair<double, double>, Cell> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = io::split_csv_line(line);
    if (f.size() != 5)
      throw std::runtime_error("polar table " + origin + ": line " + std::to_string(line_no) +
                               ": expected 5 fields, got " + std::to_string(f.size()));
    const double sigma = io::parse_double(f[0], line_no, "polar table");
    const double alpha_deg = io::parse_double(f[1], line_no, "polar table");
    const Cell c{io::parse_double(f[2], line_no, "polar table"),
                 io::parse_double(f[3], line_no, "polar table"),
                 io::parse_double(f[4], line_no, "polar table"), line_no};
    const auto key = std::make_pair(sigma, alpha_deg);
    if (const auto it = cells.find(key); it != cells.end())
      throw std::runtime_error("polar table " + origin + ": duplicate cell (sigma=" + f[0] +
                               ", alpha_deg=" + f[1] + ") at lines " +
                               std::to_string(it->second.line) + " and " +
                               std::to_string(line_no));
    cells.emplace(key, c);
  }
  if (cells.empty()) throw std::runtime_error("polar table " + origin + ": no data rows");

  std::vector<double> sig, alp;
  for (const auto& [k, v] : cells) {
    if (sig.empty() || sig.back() != k.first) sig.push_back(k.first);
  }
  for (const auto& [k, v] : cells)
    if (k.first == sig.front()) alp.push_back(k.second);

  std::vector<double> cl, cd, cm;
  cl.reserve(sig.size() * alp.size());
  for (double s : sig)
    for (double a : alp) {
      const auto it = cells.find({s, a});
      if (it == cells.end())
        throw std::runtime_error("polar table " + origin + ": ragged grid, missing cell (sigma=" +
                                 io::format_double(s) + ", alpha_deg=" + io::format_double(a) + ")");
      cl.push_back(it->second.cl);
      cd.push_back(it->second.cd);
      cm.push_back(it->second.cm);
    }
  if (cells.size() != sig.size() * alp.size()) {
    // extra cells not on the rectangular grid: report the first offender
    for (const auto& [k, v] : cells)
      if (std::find(alp.begin(), alp.end(), k.second) == alp.end())
        throw std::runtime_error("polar table " + origin + ": ragged grid, stray cell (sigma=" +
                                 io::format_double(k.first) + ", alpha_deg=" +
                                 io::format_double(k.second) + ") at line " +
                                 std::to_string(v.line));
  }

  std::vector<double> alpha_rad(alp.size());
  std::transform(alp.begin(), alp.end(), alpha_rad.begin(),
                 [](double d) { return d * kDegToRad; });
  return PolarTable(std::move(sig), std::move(alpha_rad), std::move(cl), std::move(cd),
                    std::move(cm));
}

inline PolarTable ingest_polar_table_file(const std::string& path) {
  auto in = io::open_input(path, "polar table");
  return ingest_polar_table(in, path);
}

inline void write_polar_csv(std::ostream& out, const PolarTable& t) {
  out << "sigma,alpha_deg,CL,CD,Cm\n";
  for (std::size_t i = 0; i < t.sigma_axis().size(); ++i)
    for (std::size_t j = 0; j < t.alpha_axis().size(); ++j) {
      out << io::format_double(t.sigma_axis()[i]) << ','
          << io::format_double(t.alpha_axis()[j] / kDegToRad) << ','
          << io::format_double(t.value(i, j, 0)) << ',' << io::format_double(t.value(i, j, 1))
          << ',' << io::format_double(t.value(i, j, 2)) << '\n';
    }
}

// Samples a synthetic model over a rectangular grid at dV/V = 0.
inline PolarTable make_polar_table(const SyntheticAeroModel& model,
                                   const std::vector<double>& sigma_axis,
                                   const std::vector<double>& alpha_axis_rad) {
  std::vector<double> cl, cd, cm;
  cl.reserve(sigma_axis.size() * alpha_axis_rad.size());
  for (double s : sigma_axis)
    for (double a : alpha_axis_rad) {
      const CoefficientSet c = model.eval(a, 0.0, s);
      cl.push_back(c.CL);
      cd.push_back(c.CD);
      cm.push_back(c.Cm);
    }
  return PolarTable(sigma_axis, alpha_axis_rad, std::move(cl), std::move(cd), std::move(cm));
}

}  // namespace plus::aero
