#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace jumps {

// Current/voltage figures for the CC2420-based radio model. The transmit
// current is the fit I_Tx(d/d0) = (sqrt(d/d0) + itx_offset) / itx_scale,
// where d0 is the neighbor density at the lowest output power.
struct EnergyModelParams {
  double rx_current_ma = 19.7;
  double itx_offset = 15.338;
  double itx_scale = 1.8709;
  double voltage = 3.0;
  double path_loss_exponent = 2.0;
  double reference_density = 10.0;  // d0

  void validate() const {
    if (!(rx_current_ma > 0.0)) throw std::invalid_argument("rx_current_ma must be > 0");
    if (!(itx_offset > 0.0) || !(itx_scale > 0.0))
      throw std::invalid_argument("transmit-current fit constants must be > 0");
    if (!(voltage > 0.0)) throw std::invalid_argument("voltage must be > 0");
    if (!(path_loss_exponent >= 2.0))
      throw std::invalid_argument("path_loss_exponent must be >= 2");
    if (!(reference_density > 0.0)) throw std::invalid_argument("reference_density must be > 0");
  }
};

// CC2420 datasheet output-power levels with their transmit currents. The
// lowest level is the reference point for power, range and density scaling.
struct Cc2420PowerLevel {
  double output_dbm;
  double itx_ma;
};

inline constexpr std::array<Cc2420PowerLevel, 8> cc2420_power_levels{{
    {-25.0, 8.5},
    {-15.0, 9.9},
    {-10.0, 11.2},
    {-7.0, 12.5},
    {-5.0, 13.9},
    {-3.0, 15.2},
    {-1.0, 16.5},
    {0.0, 17.4},
}};

inline double power_ratio_from_dbm(double output_dbm, double reference_dbm = -25.0) {
  return std::pow(10.0, (output_dbm - reference_dbm) / 10.0);
}

// Scaling a transmit power by `power_ratio` gains lambda^(1/alpha) in range
// and lambda^(2/alpha) in coverage area (and so in neighbor density).
inline std::pair<double, double> range_and_coverage_scale(double power_ratio,
                                                          double path_loss_exponent) {
  if (!(power_ratio > 0.0)) throw std::domain_error("power_ratio must be > 0");
  if (!(path_loss_exponent > 0.0)) throw std::domain_error("path_loss_exponent must be > 0");
  const double range = std::pow(power_ratio, 1.0 / path_loss_exponent);
  return {range, range * range};
}

// Transmit current (mA) needed to reach a neighbor density of
// `density_ratio` times the reference density.
inline double itx_of_density_ratio(double density_ratio, const EnergyModelParams& params = {}) {
  if (!(density_ratio > 0.0)) throw std::domain_error("density_ratio must be > 0");
  return (std::sqrt(density_ratio) + params.itx_offset) / params.itx_scale;
}

// Energy one node spends on a full coordinate-assignment run: one emission
// and d/d0 reception weight per flood, N floods. Units are relative
// (mA x flood, scaled by the supply voltage); only ratios are meaningful.
inline double per_node_energy(int landmark_count, double neighbor_density,
                              const EnergyModelParams& params = {}) {
  if (landmark_count < 0) throw std::domain_error("landmark_count must be >= 0");
  const double ratio = neighbor_density / params.reference_density;
  if (landmark_count == 0) return 0.0;
  return params.voltage * landmark_count *
         (itx_of_density_ratio(ratio, params) + params.rx_current_ma * ratio);
}

// Network-wide energy for M nodes and N landmark floods:
// E = U * M * N * (I_Tx(d/d0) + rx_current * d/d0).
inline double total_energy(std::size_t node_count, int landmark_count, double neighbor_density,
                           const EnergyModelParams& params = {}) {
  return static_cast<double>(node_count) *
         per_node_energy(landmark_count, neighbor_density, params);
}

struct EnergyRow {
  int landmark_count = 0;
  double neighbor_density = 0.0;
  double density_ratio = 0.0;
  double itx_ma = 0.0;
  double per_node_energy = 0.0;
  double ratio_to_reference = 0.0;
};

// Per-node energy of every (N, density) combination relative to the
// reference case of a single landmark at the reference density. Voltage and
// population cancel out of the ratios.
inline std::vector<EnergyRow> relative_energy_curve(std::span<const int> landmark_counts,
                                                    std::span<const double> densities,
                                                    const EnergyModelParams& params = {}) {
  params.validate();
  const double reference = per_node_energy(1, params.reference_density, params);
  std::vector<EnergyRow> rows;
  rows.reserve(landmark_counts.size() * densities.size());
  for (const int n : landmark_counts) {
    for (const double d : densities) {
      EnergyRow row;
      row.landmark_count = n;
      row.neighbor_density = d;
      row.density_ratio = d / params.reference_density;
      row.itx_ma = itx_of_density_ratio(row.density_ratio, params);
      row.per_node_energy = per_node_energy(n, d, params);
      row.ratio_to_reference = row.per_node_energy / reference;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace jumps
