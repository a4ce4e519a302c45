#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "relay_harvest/model.hpp"

namespace relay_harvest {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateBroadcast : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Value plus partial derivatives, keyed by variable name.
struct ValueGrad {
  double value = 0.0;
  std::vector<std::pair<const char*, double>> partials;

  double partial(const char* id) const;
};

/// Point-to-point rate C(p) = ln(1 + alpha p), nats/s.
double link_rate(double alpha, double p);

/// Energy to move c nats in l seconds over a link with gain alpha:
/// (l/alpha)(e^{c/l} - 1). Perspective convention: 0 at (l=0, c=0),
/// +inf at (l=0, c>0). Partials ("l", "c") supplied for l > 0.
ValueGrad epoch_energy(double l, double c, double alpha);

/// Minimum source power sustaining instantaneous rates (c1 to R1, c2 to R2)
/// on the degraded-broadcast boundary. Requires canonical sr1 >= sr2.
double broadcast_power(double c1, double c2, const ChannelGains& g);

/// Power fraction eta sent to R1 such that eta*p_b achieves c1.
double broadcast_split(double c1, double c2, const ChannelGains& g);

struct MacRateBounds {
  double r1_max;
  double r2_max;
  double sum_max;
};

/// Multi-access region corner bounds for relay powers (p1, p2).
MacRateBounds mac_rate_bounds(double p1, double p2, const ChannelGains& g);

}  // namespace relay_harvest
