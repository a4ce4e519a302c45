#include "relay_harvest/rates.hpp"

#include <cmath>

namespace relay_harvest {

double ValueGrad::partial(const char* id) const {
  for (const auto& [k, v] : partials) {
    if (std::string_view(k) == id) return v;
  }
  throw DomainError(std::string("no partial named ") + id);
}

double link_rate(double alpha, double p) {
  if (!(alpha > 0.0)) throw DomainError("link_rate: alpha must be positive");
  if (p < 0.0) throw DomainError("link_rate: negative power");
  return std::log1p(alpha * p);
}

ValueGrad epoch_energy(double l, double c, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("epoch_energy: alpha must be positive");
  if (l < 0.0 || c < 0.0) throw DomainError("epoch_energy: negative input");
  ValueGrad out;
  if (l == 0.0) {
    out.value = c > 0.0 ? kInf : 0.0;
    return out;
  }
  const double u = c / l;
  if (u > 700.0) {  // e^u would overflow; the energy is unrepresentable anyway
    out.value = kInf;
    return out;
  }
  const double eu = std::exp(u);
  out.value = l / alpha * std::expm1(u);
  out.partials = {{"l", (std::expm1(u) - u * eu) / alpha}, {"c", eu / alpha}};
  return out;
}

double broadcast_power(double c1, double c2, const ChannelGains& g) {
  if (c1 < 0.0 || c2 < 0.0) throw DomainError("broadcast_power: negative rate");
  const double a1 = g.sr1, a2 = g.sr2;
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw DomainError("broadcast_power: gains must be positive");
  // (1/a2 - 1/a1) e^{c2} - 1/a2 + (1/a1) e^{c1+c2}, written in expm1 form so
  // that small rates do not cancel catastrophically.
  const double A = 1.0 / a2 - 1.0 / a1;
  return A * std::expm1(c2) + std::expm1(c1 + c2) / a1;
}

double broadcast_split(double c1, double c2, const ChannelGains& g) {
  const double pb = broadcast_power(c1, c2, g);
  if (!(pb > 0.0)) throw DegenerateBroadcast("broadcast_split: zero broadcast power");
  return std::expm1(c1) / (g.sr1 * pb);
}

MacRateBounds mac_rate_bounds(double p1, double p2, const ChannelGains& g) {
  if (p1 < 0.0 || p2 < 0.0) throw DomainError("mac_rate_bounds: negative power");
  return MacRateBounds{std::log1p(g.r1d * p1), std::log1p(g.r2d * p2),
                       std::log1p(g.r1d * p1 + g.r2d * p2)};
}

}  // namespace relay_harvest
