#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "radioclass/models.hpp"

namespace radioclass {

std::string base64_encode(const uint8_t* data, size_t len);
std::vector<uint8_t> base64_decode(const std::string& text);

/// JSON envelope {kind, feature_space, train_meta, parameters}; parameter
/// tensors are base64 little-endian f64 blobs with explicit shapes, so a
/// load/save round trip preserves predictions bit for bit.
std::string model_to_json(const Model& model, FeatureSpace space);

/// Inverse of model_to_json. Throws IoError on malformed input.
std::unique_ptr<Model> model_from_json(const std::string& json_text,
                                       FeatureSpace* space_out = nullptr);

void save_model(const std::filesystem::path& path, const Model& model,
                FeatureSpace space);
std::unique_ptr<Model> load_model(const std::filesystem::path& path,
                                  FeatureSpace* space_out = nullptr);

}  // namespace radioclass
