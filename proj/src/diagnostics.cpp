#include "dykls/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace dykls {

namespace {

RateFit line_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res <= 1e-300 ? 1.0 : 0.0);
  return fit;
}

}  // namespace

std::string rate_model_name(RateModel m) {
  switch (m) {
    case RateModel::Geometric: return "geometric";
    case RateModel::InvLinear: return "O(1/k)";
    case RateModel::InvSqrt: return "O(1/k^2)";
    case RateModel::Power: return "power";
  }
  return "?";
}

const RateFit& RateReport::fit(RateModel m) const {
  switch (m) {
    case RateModel::Geometric: return geometric;
    case RateModel::InvLinear: return inv_linear;
    case RateModel::InvSqrt: return inv_sqrt;
    case RateModel::Power: return power;
  }
  return geometric;
}

RateReport rate_fit(const std::vector<std::pair<double, double>>& series) {
  const std::size_t tail_start = series.size() / 2;
  std::vector<double> ks, ys;
  for (std::size_t i = tail_start; i < series.size(); ++i) {
    ks.push_back(series[i].first);
    ys.push_back(series[i].second);
  }
  if (ks.size() < 20)
    throw DegenerateSeries("rate_fit: tail shorter than 20 points");
  for (double y : ys)
    if (!(y > 0.0) || !std::isfinite(y))
      throw DegenerateSeries("rate_fit: nonpositive value in tail");

  auto transform = [&](auto fx, auto fy) {
    std::vector<double> tx(ks.size()), ty(ys.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      tx[i] = fx(ks[i]);
      ty[i] = fy(ys[i]);
    }
    return line_fit(tx, ty);
  };

  RateReport rep;
  rep.tail_points = static_cast<int>(ks.size());
  rep.geometric = transform([](double k) { return k; },
                            [](double y) { return std::log(y); });
  rep.inv_linear = transform([](double k) { return k; },
                             [](double y) { return 1.0 / y; });
  rep.inv_sqrt = transform([](double k) { return k; },
                           [](double y) { return 1.0 / std::sqrt(y); });
  rep.power = transform([](double k) { return std::log(k); },
                        [](double y) { return std::log(y); });

  const RateModel order[] = {RateModel::Geometric, RateModel::InvLinear,
                             RateModel::InvSqrt, RateModel::Power};
  rep.best = RateModel::Geometric;
  double best_r2 = rep.geometric.r2;
  for (RateModel m : order) {
    const double r2 = rep.fit(m).r2;
    if (r2 > best_r2 + 1e-9) {
      best_r2 = r2;
      rep.best = m;
    }
  }
  return rep;
}

std::vector<std::pair<double, double>> positive_prefix(
    const std::vector<std::pair<double, double>>& series, double rel_floor) {
  std::vector<std::pair<double, double>> out;
  double y_max = 0.0;
  for (const auto& [k, y] : series) {
    if (!std::isfinite(y)) {
      if (out.empty()) continue;  // leading infinities (cold-start duals)
      break;
    }
    if (y <= 0.0) break;
    y_max = std::max(y_max, y);
    if (y <= rel_floor * y_max) break;
    out.emplace_back(k, y);
  }
  return out;
}

double envelope_lemma25(double a1, double theta, int k) {
  if (!(a1 > 0.0) || !(theta > 0.0) || k < 1)
    throw std::invalid_argument("envelope_lemma25: need a1>0, theta>0, k>=1");
  const double a3 = a1 * a1 * a1;
  const double base =
      1.0 / a3 + (static_cast<double>(k) - 1.0) * 3.0 * theta /
                     (3.0 * theta * a3 + 1.0);
  return std::pow(base, -1.0 / 3.0);
}

}  // namespace dykls
