#pragma once

#include <string>

#include <json.hpp>

#include "actorflow/adam.hpp"
#include "actorflow/nn.hpp"
#include "actorflow/tensor.hpp"

namespace actorflow {

using Json = nlohmann::json;

// Checkpoint files are self-describing JSON: a format version, a model tag,
// hyperparameters, and flat 64-bit value arrays with shapes. nlohmann
// serializes doubles with round-trip precision, so save/load is exact.
inline constexpr int kCheckpointFormatVersion = 1;

Json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const Json& j);

Json mlp_to_json(const MlpParams& p);
MlpParams mlp_from_json(const Json& j);

Json adam_to_json(const Adam& a);
void adam_from_json(const Json& j, Adam& a);

void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

}  // namespace actorflow
