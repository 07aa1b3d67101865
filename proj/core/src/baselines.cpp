#include "isac/baselines.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace isac {

namespace {

constexpr double kQFloor = 1e-6;

/// Smallest q in [floor, 1e6] with rate(q) <= cap (rate decreasing in q).
double bisect_min_quantizer(const std::function<double(double)>& rate, double cap) {
  if (rate(kQFloor) <= cap) return kQFloor;
  double lo = kQFloor, hi = 1e6;
  if (rate(hi) > cap) {
    throw std::runtime_error("random_beamforming_design: bisection bracket exhausted");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    (rate(mid) > cap ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

DesignPoint random_beamforming_design(const ChannelSet& ch, const Budgets& budgets,
                                      const NoiseLevels& noise, Rng& rng) {
  DesignPoint d;
  d.beam.resize(ch.tx_dim(), ch.n_users);
  for (Eigen::Index r = 0; r < d.beam.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.beam.cols(); ++c) {
      d.beam(r, c) = complex_gaussian(rng);
    }
  }
  d.q_tx.resize(ch.n_tx);
  d.q_rx.resize(ch.n_rx);

  const int na = ch.n_antennas;
  for (int i = 0; i < ch.n_tx; ++i) {
    auto block = d.beam.middleRows(static_cast<Eigen::Index>(i) * na, na);
    const double raw_norm = block.norm();
    if (raw_norm == 0.0) {
      throw std::runtime_error("random_beamforming_design: degenerate zero block");
    }
    // beam power at quantizer level q keeps the per-TX power at the cap
    auto scaled_rate = [&](double q) {
      const double beam_power = std::max(budgets.power - na * q, 0.0);
      DesignPoint tmp = d;
      tmp.beam.middleRows(static_cast<Eigen::Index>(i) * na, na) =
          block * (std::sqrt(beam_power) / raw_norm);
      tmp.q_tx(i) = q;
      return fronthaul_rate_tx(tmp, ch, i);
    };
    d.q_tx(i) = bisect_min_quantizer(scaled_rate, budgets.cap_tx);
    const double beam_power = std::max(budgets.power - na * d.q_tx(i), 0.0);
    block *= std::sqrt(beam_power) / raw_norm;
  }

  for (int j = 0; j < ch.n_rx; ++j) {
    d.q_rx(j) = 1.0;  // placeholder, overwritten below
  }
  for (int j = 0; j < ch.n_rx; ++j) {
    auto rate = [&](double q) {
      DesignPoint tmp = d;
      tmp.q_rx(j) = q;
      return fronthaul_rate_rx(tmp, ch, j, noise.rx);
    };
    d.q_rx(j) = bisect_min_quantizer(rate, budgets.cap_rx);
  }
  return d;
}

std::pair<DesignPoint, MMTrace> distributed_sensing_design(const ChannelSet& ch,
                                                           const Budgets& budgets,
                                                           const NoiseLevels& noise,
                                                           const MMSettings& settings,
                                                           Rng& rng) {
  return mm_optimize(ch, budgets, noise, settings, rng);
}

}  // namespace isac
