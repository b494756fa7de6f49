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
#include "vsent/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_ratios(const SplitRatios& r) {
  if (!(r.train > 0 && r.val > 0 && r.test > 0))
    throw InvalidArgument("split ratios must all be positive");
  if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9)
    throw InvalidArgument("split ratios must sum to 1");
}

}  // namespace

SplitRatios parse_split_ratios(std::string_view s) {
  const auto parts = text::split(s, ',');
  if (parts.size() != 3) throw InvalidArgument("split must be three comma-separated ratios");
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    try {
      std::size_t used = 0;
      const auto t = text::trim(parts[i]);
      v[i] = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw InvalidArgument("split ratio is not a number: " + parts[i]);
    }
  }
  const SplitRatios r{v[0], v[1], v[2]};
  check_ratios(r);
  return r;
}

namespace {

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& r) {
  const std::array<double, 3> share{r.train, r.val, r.test};
  std::array<std::size_t, 3> size{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = share[s] * static_cast<double>(n);
    size[s] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[s] = exact - static_cast<double>(size[s]);
    used += size[s];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t k = 0; used < n; k = (k + 1) % 3, ++used) ++size[order[k]];
  for (std::size_t s = 0; s < 3; ++s) {
    if (size[s] > 0) continue;
    const auto donor = static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
    --size[donor];
    ++size[s];
  }
  return size;
}

json example_to_json(const DatasetExample& e) {
  return {{"id", e.id}, {"path", e.path}, {"disaster_type", e.disaster_type}, {"labels", e.labels}};
}

void write_split(const fs::path& path, const std::vector<DatasetExample>& examples) {
  std::ostringstream os;
  for (const auto& e : examples) os << example_to_json(e).dump() << '\n';
  text::write_file(path, os.str());
}

std::vector<DatasetExample> read_split(const fs::path& dir, const char* name, std::size_t labels) {
  const auto path = dir / name;
  std::ifstream in(path);
  if (!in) throw ConfigError("dataset split missing: " + path.string());
  std::vector<DatasetExample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(lineno);
    try {
      const auto j = json::parse(line);
      DatasetExample e;
      e.id = j.at("id").get<std::string>();
      e.path = j.at("path").get<std::string>();
      e.disaster_type = j.value("disaster_type", "");
      e.labels = j.at("labels").get<std::vector<std::uint8_t>>();
      if (e.labels.size() != labels) throw DataError(where, "label vector length differs from vocabulary");
      if (fs::path(e.path).is_relative()) e.path = (dir / e.path).lexically_normal().string();
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw DataError(where, ex.what());
    }
  }
  return out;
}

}  // namespace

DatasetSplit split_dataset(const std::vector<std::string>& image_ids,
                           const std::vector<std::string>& strata, SplitRatios ratios,
                           std::uint64_t seed) {
  check_ratios(ratios);
  if (image_ids.size() < 3) throw InvalidArgument("need at least three images to split");
  if (strata.size() != image_ids.size()) throw InvalidArgument("one stratum per image required");
  if (std::set<std::string>(image_ids.begin(), image_ids.end()).size() != image_ids.size())
    throw InvalidArgument("duplicate image ids");

  std::map<std::string, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < image_ids.size(); ++i) groups[strata[i]].push_back(image_ids[i]);

  std::mt19937_64 rng(seed);
  std::vector<std::string> order;
  for (auto& [stratum, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    order.insert(order.end(), ids.begin(), ids.end());
  }

  const std::size_t n = order.size();
  const auto target = apportion(n, ratios);
  std::array<std::size_t, 3> assigned{};
  std::array<std::vector<std::string>*, 3> out{};
  DatasetSplit split;
  out = {&split.train, &split.val, &split.test};
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t pick = 3;
    double best = -1e300;
    for (std::size_t s = 0; s < 3; ++s) {
      if (assigned[s] >= target[s]) continue;
      const double deficit = static_cast<double>(target[s]) * static_cast<double>(p + 1) /
                                 static_cast<double>(n) -
                             static_cast<double>(assigned[s]);
      if (deficit > best + 1e-12) {
        best = deficit;
        pick = s;
      }
    }
    ++assigned[pick];
    out[pick]->push_back(order[p]);
  }
  for (auto* v : out) std::sort(v->begin(), v->end());
  return split;
}

DatasetSplit export_dataset(const std::vector<LabelVector>& labels,
                            const std::vector<ImageRecord>& manifest, const TagVocabulary& vocab,
                            SplitRatios ratios, std::uint64_t seed, const fs::path& out_dir,
                            DatasetMeta meta) {
  std::map<std::string, const ImageRecord*> by_id;
  for (const auto& r : manifest) by_id[r.id] = &r;

  std::vector<std::string> ids, strata;
  std::map<std::string, const LabelVector*> label_of;
  for (const auto& l : labels) {
    if (l.bits.size() != vocab.size())
      throw InvalidArgument("label vector for " + l.image_id + " has wrong length");
    if (!l.any()) {
      if (std::find(meta.all_zero.begin(), meta.all_zero.end(), l.image_id) == meta.all_zero.end())
        meta.all_zero.push_back(l.image_id);
      continue;
    }
    const auto it = by_id.find(l.image_id);
    if (it == by_id.end()) throw ConfigError("labelled image missing from manifest: " + l.image_id);
    ids.push_back(l.image_id);
    strata.push_back(it->second->disaster_type);
    label_of[l.image_id] = &l;
  }

  auto split = split_dataset(ids, strata, ratios, seed);
  Dataset ds;
  ds.vocabulary = vocab;
  meta.ratios = ratios;
  meta.seed = seed;
  ds.meta = std::move(meta);
  auto fill = [&](const std::vector<std::string>& part, std::vector<DatasetExample>& dst) {
    for (const auto& id : part) {
      const auto* rec = by_id.at(id);
      dst.push_back({id, rec->path, rec->disaster_type, label_of.at(id)->bits});
    }
  };
  fill(split.train, ds.train);
  fill(split.val, ds.val);
  fill(split.test, ds.test);
  write_dataset(out_dir, ds);
  return split;
}

void write_dataset(const fs::path& dir, const Dataset& ds) {
  fs::create_directories(dir);
  write_vocabulary(dir / "vocab.txt", ds.vocabulary);
  write_split(dir / "train.jsonl", ds.train);
  write_split(dir / "val.jsonl", ds.val);
  write_split(dir / "test.jsonl", ds.test);
  json shortfall = json::array();
  for (const auto& s : ds.meta.shortfall)
    shortfall.push_back({{"image_id", s.image_id}, {"responses", s.responses}});
  json meta = {{"split", {ds.meta.ratios.train, ds.meta.ratios.val, ds.meta.ratios.test}},
               {"seed", ds.meta.seed},
               {"threshold", ds.meta.threshold ? json(*ds.meta.threshold) : json(nullptr)},
               {"sizes", {ds.train.size(), ds.val.size(), ds.test.size()}},
               {"all_zero", ds.meta.all_zero},
               {"shortfall", shortfall}};
  text::write_file(dir / "dataset.json", meta.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("dataset directory not found: " + dir.string());
  if (!fs::exists(dir / "vocab.txt")) throw ConfigError("dataset has no vocab.txt: " + dir.string());
  Dataset ds;
  ds.vocabulary = read_vocabulary(dir / "vocab.txt");
  ds.train = read_split(dir, "train.jsonl", ds.vocabulary.size());
  ds.val = read_split(dir, "val.jsonl", ds.vocabulary.size());
  ds.test = read_split(dir, "test.jsonl", ds.vocabulary.size());
  if (fs::exists(dir / "dataset.json")) {
    try {
      const auto j = json::parse(text::read_file(dir / "dataset.json"));
      const auto split = j.at("split").get<std::vector<double>>();
      if (split.size() == 3) ds.meta.ratios = {split[0], split[1], split[2]};
      ds.meta.seed = j.value("seed", std::uint64_t{0});
      if (j.contains("threshold") && !j["threshold"].is_null())
        ds.meta.threshold = j["threshold"].get<double>();
      ds.meta.all_zero = j.value("all_zero", std::vector<std::string>{});
      for (const auto& s : j.value("shortfall", json::array()))
        ds.meta.shortfall.push_back({s.at("image_id").get<std::string>(), s.at("responses").get<std::size_t>()});
    } catch (const json::exception& e) {
      throw DataError((dir / "dataset.json").string(), e.what());
    }
  }
  return ds;
}

}  // namespace vsent
