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
#include "vsent/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

using nlohmann::json;

LabelMetrics per_label_accuracy(std::span<const Eigen::VectorXd> probs,
                                std::span<const std::vector<std::uint8_t>> targets, double threshold,
                                const TagVocabulary& vocab) {
  if (probs.empty()) throw InvalidArgument("per_label_accuracy: no examples");
  if (probs.size() != targets.size())
    throw InvalidArgument("per_label_accuracy: prediction and target counts differ");
  const std::size_t labels = vocab.size();
  std::vector<std::size_t> correct(labels, 0), support(labels, 0);
  std::size_t exact = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (static_cast<std::size_t>(probs[i].size()) != labels || targets[i].size() != labels)
      throw InvalidArgument("per_label_accuracy: vector length differs from vocabulary");
    bool all = true;
    for (std::size_t l = 0; l < labels; ++l) {
      const bool predicted = probs[i](static_cast<Eigen::Index>(l)) >= threshold;
      const bool truth = targets[i][l] != 0;
      if (predicted == truth) {
        ++correct[l];
      } else {
        all = false;
      }
      support[l] += truth ? 1 : 0;
    }
    exact += all ? 1 : 0;
  }
  LabelMetrics m;
  m.examples = probs.size();
  const double n = static_cast<double>(probs.size());
  double sum = 0.0;
  for (std::size_t l = 0; l < labels; ++l) {
    const double acc = 100.0 * static_cast<double>(correct[l]) / n;
    m.per_label[vocab[l]] = {acc, support[l]};
    sum += static_cast<double>(correct[l]);
  }
  m.overall_accuracy = 100.0 * sum / (n * static_cast<double>(labels));
  m.subset_accuracy = 100.0 * static_cast<double>(exact) / n;
  return m;
}

std::string render_report(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw InvalidArgument("render_report: no reports");
  const std::string h1 = "Model", h2 = "Accuracy (%)";
  std::vector<std::string> values;
  std::size_t w1 = h1.size(), w2 = h2.size();
  for (const auto& r : reports) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", r.overall_accuracy);
    values.emplace_back(buf);
    w1 = std::max(w1, r.model_label.size());
    w2 = std::max(w2, values.back().size());
  }
  std::ostringstream os;
  os << "| " << std::left << std::setw(static_cast<int>(w1)) << h1 << " | "
     << std::setw(static_cast<int>(w2)) << h2 << " |\n";
  os << "|" << std::string(w1 + 2, '-') << "|" << std::string(w2 + 2, '-') << "|\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    os << "| " << std::left << std::setw(static_cast<int>(w1)) << reports[i].model_label << " | "
       << std::right << std::setw(static_cast<int>(w2)) << values[i] << " |\n";
  }
  return os.str();
}

std::string report_to_json_line(const MetricsReport& r) {
  json per = json::object();
  for (const auto& [tag, s] : r.per_label) per[tag] = {{"accuracy", s.accuracy}, {"support", s.support}};
  json j = {{"model_label", r.model_label},
            {"overall_accuracy", r.overall_accuracy},
            {"subset_accuracy", r.subset_accuracy},
            {"per_label", per},
            {"config_hash", r.config_hash},
            {"test_examples", r.test_examples},
            {"threshold", r.threshold}};
  return j.dump();
}

MetricsReport report_from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    MetricsReport r;
    r.model_label = j.at("model_label").get<std::string>();
    r.overall_accuracy = j.at("overall_accuracy").get<double>();
    r.subset_accuracy = j.value("subset_accuracy", 0.0);
    const auto per = j.value("per_label", json::object());
    for (const auto& [tag, s] : per.items())
      r.per_label[tag] = {s.at("accuracy").get<double>(), s.at("support").get<std::size_t>()};
    r.config_hash = j.value("config_hash", "");
    r.test_examples = j.value("test_examples", std::size_t{0});
    r.threshold = j.value("threshold", 0.5);
    if (r.overall_accuracy < 0.0 || r.overall_accuracy > 100.0)
      throw DataError("report", "overall_accuracy outside [0, 100]");
    return r;
  } catch (const json::exception& e) {
    throw DataError("report", e.what());
  }
}

void append_report(const std::filesystem::path& path, const MetricsReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError(path.string(), "cannot open report file");
  out << report_to_json_line(report) << '\n';
}

std::vector<MetricsReport> read_reports(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), "cannot open report file");
  std::vector<MetricsReport> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(report_from_json_line(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno), e.what());
    }
  }
  return out;
}

}  // namespace vsent
