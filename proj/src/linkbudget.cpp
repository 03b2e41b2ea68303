#include "uavcov/linkbudget.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov::link {

namespace {

// Distance at which the free-space argument 4 pi d f_c / v_c equals one.
double unit_loss_distance(const A2AParams& p) {
  return kSpeedOfLight / (4.0 * std::numbers::pi * p.carrier_hz);
}

void require_positive_distance(double d) {
  if (!(d > 0.0)) throw DomainError("distance must be positive, got " + std::to_string(d));
}

}  // namespace

void validate(const A2AParams& p) {
  if (!(p.pathloss_exponent > 0.0)) throw InvalidConfiguration("path-loss exponent must be > 0");
  if (!(p.carrier_hz > 0.0)) throw InvalidConfiguration("carrier frequency must be > 0");
}

void validate(const A2GParams& p) {
  if (!(p.ref_channel_gain > 0.0) || !(p.gu_tx_power_w > 0.0) || !(p.bandwidth_hz > 0.0) ||
      !(p.noise_density_w_per_hz > 0.0) || !(p.rate_threshold_bps > 0.0))
    throw InvalidConfiguration("A2G parameters must all be positive");
}

double path_loss_db(const A2AParams& p, double distance_m) {
  require_positive_distance(distance_m);
  return 10.0 * p.pathloss_exponent * std::log10(distance_m / unit_loss_distance(p));
}

double received_power_dbm(const A2AParams& p, double distance_m) {
  return p.tx_power_dbm + p.tx_gain_db + p.rx_gain_db - path_loss_db(p, distance_m);
}

double max_a2a_distance_m(const A2AParams& p) {
  validate(p);
  const double margin_db = p.tx_power_dbm + p.tx_gain_db + p.rx_gain_db - p.threshold_dbm;
  return unit_loss_distance(p) *
         std::exp(std::numbers::ln10 / (10.0 * p.pathloss_exponent) * margin_db);
}

double a2g_rate_bps(const A2GParams& p, double distance_m) {
  require_positive_distance(distance_m);
  const double snr = p.gu_tx_power_w * (p.ref_channel_gain / (distance_m * distance_m)) /
                     (p.bandwidth_hz * p.noise_density_w_per_hz);
  return p.bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

double max_a2g_distance_m(const A2GParams& p) {
  validate(p);
  const double exponent = p.rate_threshold_bps / p.bandwidth_hz * std::numbers::ln2;
  // 2^(R/B) - 1, without cancellation for small R/B.
  const double snr_needed = std::expm1(exponent);
  if (!std::isfinite(snr_needed))
    throw RangeError("rate threshold / bandwidth too large: 2^(R_th/B) overflows");
  const double d2 = p.gu_tx_power_w * p.ref_channel_gain /
                    (snr_needed * p.bandwidth_hz * p.noise_density_w_per_hz);
  if (!std::isfinite(d2) || !(d2 > 0.0))
    throw RangeError("maximum A2G distance is not representable");
  return std::sqrt(d2);
}

double tuav_cover_radius_m(double d_jm, double altitude_m) {
  if (!(altitude_m >= 0.0)) throw DomainError("altitude must be >= 0");
  if (d_jm < altitude_m)
    throw InfeasibleAltitude("A2G range " + std::to_string(d_jm) + " m is below altitude " +
                             std::to_string(altitude_m) + " m; coverage disk is empty");
  return std::sqrt((d_jm - altitude_m) * (d_jm + altitude_m));
}

double swarm_radius_m(double r_j, double r_ij) {
  if (!(r_j >= 0.0) || !(r_ij >= 0.0)) throw DomainError("radii must be >= 0");
  return r_j + r_ij;
}

SwarmGeometry derive_geometry(const A2AParams& a2a, const A2GParams& a2g, double altitude_m) {
  SwarmGeometry g;
  g.altitude_m = altitude_m;
  g.a2a_radius_m = max_a2a_distance_m(a2a);
  g.tuav_cover_radius_m = tuav_cover_radius_m(max_a2g_distance_m(a2g), altitude_m);
  g.swarm_radius_m = swarm_radius_m(g.tuav_cover_radius_m, g.a2a_radius_m);
  return g;
}

}  // namespace uavcov::link
