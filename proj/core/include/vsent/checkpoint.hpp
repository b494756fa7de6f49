/* Copyright 2026 The vsent Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vsent/model.hpp"

namespace vsent {

/// Everything needed to rebuild a trained model, serialized as one JSON
/// document: vocabulary, streams, backbone seed and parameters, head, the
/// training configuration and the loss curve.
struct Checkpoint {
  FusionModel model;
  TrainingConfig training;
  std::vector<double> epoch_loss;
  std::string dataset;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// Throws DataError on a malformed or incompatible file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vsent
