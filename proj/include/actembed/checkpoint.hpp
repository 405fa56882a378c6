#pragma once

#include <string>

#include "actembed/autoencoder.hpp"

namespace actembed {

inline constexpr const char* kCheckpointMagic = "ACTEMBED1";

// Text container: the magic line followed by a JSON body holding the network
// shape, weights, standardizer statistics, and the training configuration.
// Doubles round-trip exactly.
void save_checkpoint(const autoencoder::TrainedModel& model, const std::string& path);
autoencoder::TrainedModel load_checkpoint(const std::string& path);

}  // namespace actembed
