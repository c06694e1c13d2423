#pragma once

#include <memory>
#include <string>

#include "ncf/model.hpp"

namespace ncf {

// Text checkpoint: a metadata header (kind, shapes, config echo) followed by
// one named tensor per block, values hex-formatted so the round trip is
// bit-exact.
void save_checkpoint(const std::string& path, ModelGraph& model);

// Rebuilds the model from the header. DeepMF needs the train partition to
// reconstruct its rating-row inputs.
std::unique_ptr<ModelGraph> load_checkpoint(const std::string& path,
                                            std::span<const Interaction> train = {});

}  // namespace ncf
