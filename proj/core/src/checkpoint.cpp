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
#include "vsent/checkpoint.hpp"

#include <json.hpp>

#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "vsent-checkpoint";
constexpr int kVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw DataError("checkpoint", "matrix row count mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw DataError("checkpoint", "matrix column count mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index size) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != size) throw DataError("checkpoint", "vector length mismatch");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), size);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto& model = ckpt.model;
  json streams = json::array();
  json backbones = json::array();
  for (const auto& b : model.backbones()) {
    const auto& s = b.spec();
    streams.push_back({{"name", s.name},
                       {"domain", std::string(to_string(s.domain))},
                       {"feature_dim", s.feature_dim},
                       {"input_size", s.input_size}});
    backbones.push_back({{"filters", matrix_to_json(b.filters())}, {"biases", vector_to_json(b.biases())}});
  }
  const auto& t = ckpt.training;
  json j = {{"format", kFormat},
            {"version", kVersion},
            {"vocabulary", model.vocabulary().tags()},
            {"streams", streams},
            {"fused_dim", model.config().fused_dim()},
            {"backbone_seed", model.backbone_seed()},
            {"backbones", backbones},
            {"head", {{"weights", matrix_to_json(model.head().weights)}, {"biases", vector_to_json(model.head().biases)}}},
            {"training",
             {{"learning_rate", t.learning_rate},
              {"epochs", t.epochs},
              {"batch_size", t.batch_size},
              {"seed", t.seed},
              {"freeze_backbones", t.freeze_backbones}}},
            {"seed", t.seed},
            {"epoch_loss", ckpt.epoch_loss},
            {"dataset", ckpt.dataset}};
  text::write_file(path, j.dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto where = path.string();
  try {
    const auto j = json::parse(text::read_file(path));
    if (j.value("format", "") != kFormat) throw DataError(where, "not a vsent checkpoint");
    if (j.value("version", 0) != kVersion) throw DataError(where, "unsupported checkpoint version");

    FusionConfig config;
    for (const auto& s : j.at("streams")) {
      BackboneSpec spec;
      spec.name = s.at("name").get<std::string>();
      spec.domain = parse_pretrain_domain(s.at("domain").get<std::string>());
      spec.feature_dim = s.at("feature_dim").get<std::size_t>();
      spec.input_size = s.at("input_size").get<int>();
      config.streams.push_back(spec);
    }
    TagVocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());

    Checkpoint ckpt;
    ckpt.model = FusionModel(config, vocab, j.at("backbone_seed").get<std::uint64_t>(), 0);
    const auto& bj = j.at("backbones");
    if (bj.size() != config.streams.size()) throw DataError(where, "backbone count mismatch");
    for (std::size_t i = 0; i < bj.size(); ++i) {
      auto& b = ckpt.model.backbones()[i];
      b.set_parameters(matrix_from_json(bj[i].at("filters"), b.filters().rows(), b.filters().cols()),
                       vector_from_json(bj[i].at("biases"), b.biases().size()));
    }
    SigmoidHead head(config.fused_dim(), vocab.size());
    head.weights = matrix_from_json(j.at("head").at("weights"), head.weights.rows(), head.weights.cols());
    head.biases = vector_from_json(j.at("head").at("biases"), head.biases.size());
    ckpt.model.set_head(std::move(head));

    const auto& t = j.at("training");
    ckpt.training.learning_rate = t.at("learning_rate").get<double>();
    ckpt.training.epochs = t.at("epochs").get<std::size_t>();
    ckpt.training.batch_size = t.at("batch_size").get<std::size_t>();
    ckpt.training.seed = t.at("seed").get<std::uint64_t>();
    ckpt.training.freeze_backbones = t.at("freeze_backbones").get<bool>();
    ckpt.epoch_loss = j.value("epoch_loss", std::vector<double>{});
    ckpt.dataset = j.value("dataset", "");
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(where, e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(where, e.what());
  } catch (const ConfigError& e) {
    throw DataError(where, e.what());
  }
}

}  // namespace vsent
