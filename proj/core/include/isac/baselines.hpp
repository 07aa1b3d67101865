#pragma once

#include "isac/mm.hpp"

namespace isac {

/// Channel-agnostic reference design: i.i.d. Gaussian beams at full per-TX
/// power, quantization levels bisected to the smallest variances meeting the
/// fronthaul caps. Secrecy is not enforced.
DesignPoint random_beamforming_design(const ChannelSet& ch, const Budgets& budgets,
                                      const NoiseLevels& noise, Rng& rng);

/// Transmit design of the distributed-sensing baseline: reuses the proposed
/// optimizer's design; only the detection fusion path differs.
std::pair<DesignPoint, MMTrace> distributed_sensing_design(const ChannelSet& ch,
                                                           const Budgets& budgets,
                                                           const NoiseLevels& noise,
                                                           const MMSettings& settings,
                                                           Rng& rng);

}  // namespace isac
