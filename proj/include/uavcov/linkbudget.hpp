#pragma once

namespace uavcov::link {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

// Air-to-air link between the head UAV and a tail UAV. Powers in dBm,
// gains in dB.
struct A2AParams {
  double tx_power_dbm = 20.0;
  double tx_gain_db = 0.0;
  double rx_gain_db = 0.0;
  double threshold_dbm = -80.0;
  double pathloss_exponent = 2.0;
  double carrier_hz = 2.4e9;
};

// Air-to-ground line-of-sight link between a tail UAV and a ground user.
// All quantities linear SI.
struct A2GParams {
  double ref_channel_gain = 1e-4;       // beta_0 at 1 m
  double gu_tx_power_w = 0.1;
  double bandwidth_hz = 1e6;
  double noise_density_w_per_hz = 1e-20;
  double rate_threshold_bps = 1e6;
};

struct SwarmGeometry {
  double a2a_radius_m = 0.0;
  double tuav_cover_radius_m = 0.0;
  double swarm_radius_m = 0.0;
  double altitude_m = 0.0;
};

void validate(const A2AParams& p);
void validate(const A2GParams& p);

// 10 a log10(4 pi d f_c / v_c). Throws DomainError for d <= 0.
double path_loss_db(const A2AParams& p, double distance_m);
double received_power_dbm(const A2AParams& p, double distance_m);
// Largest separation whose received power still meets the threshold.
double max_a2a_distance_m(const A2AParams& p);

// B log2(1 + P beta_0 / (d^2 B eta)). Throws DomainError for d <= 0.
double a2g_rate_bps(const A2GParams& p, double distance_m);
// Distance at which the A2G rate equals the threshold. Throws RangeError
// when 2^(R_th/B) overflows.
double max_a2g_distance_m(const A2GParams& p);

// sqrt(d^2 - h^2). Throws InfeasibleAltitude when d < h.
double tuav_cover_radius_m(double d_jm, double altitude_m);
double swarm_radius_m(double r_j, double r_ij);

// Composes the full chain: A2A radius, A2G range, ground radius, swarm radius.
SwarmGeometry derive_geometry(const A2AParams& a2a, const A2GParams& a2g, double altitude_m);

}  // namespace uavcov::link
