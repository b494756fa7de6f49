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
// vsent: command-line front end for the disaster visual-sentiment pipeline.
//
//   ingest            crawl sources with catalog-expanded keywords into a manifest
//   mine-tags         rank metadata tokens and write the annotation vocabulary
//   serve-annotation  run the crowd-sourcing HTTP service
//   stats             print tag counts and co-occurrence for a store
//   export-dataset    aggregate responses into a train/val/test dataset
//   synth             write a synthetic object/background dataset
//   train, predict, evaluate, experiment, report

#include <pthread.h>

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vsent/annotation.hpp"
#include "vsent/annotation_server.hpp"
#include "vsent/annotation_store.hpp"
#include "vsent/checkpoint.hpp"
#include "vsent/corpus.hpp"
#include "vsent/dataset.hpp"
#include "vsent/digest.hpp"
#include "vsent/error.hpp"
#include "vsent/eval.hpp"
#include "vsent/experiment.hpp"
#include "vsent/log.hpp"
#include "vsent/synthetic.hpp"
#include "vsent/tags.hpp"
#include "vsent/text.hpp"

namespace fs = std::filesystem;
using namespace vsent;

namespace {

std::vector<BackboneSpec> parse_streams(const std::string& text) {
  std::vector<BackboneSpec> out;
  for (const auto& part : text::split(text, ',')) {
    const auto t = text::trim(part);
    if (!t.empty()) out.push_back(parse_stream_spec(t));
  }
  if (out.empty()) throw InvalidArgument("no streams given");
  return out;
}

void add_training_options(CLI::App* cmd, TrainingConfig& cfg, bool& unfreeze) {
  cmd->add_option("--lr", cfg.learning_rate, "SGD learning rate")->capture_default_str();
  cmd->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--batch", cfg.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Shuffling and head initialization seed")->capture_default_str();
  cmd->add_flag("--unfreeze", unfreeze, "Also update backbone filters");
}

void print_matrix(const TagVocabulary& vocab, const std::vector<std::vector<std::size_t>>& rows) {
  std::size_t w = 0;
  for (const auto& t : vocab.tags()) w = std::max(w, t.size());
  std::cout << std::setw(static_cast<int>(w)) << "";
  for (const auto& t : vocab.tags()) std::cout << ' ' << std::setw(static_cast<int>(std::max<std::size_t>(t.size(), 5))) << t;
  std::cout << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::cout << std::left << std::setw(static_cast<int>(w)) << vocab[i] << std::right;
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      std::cout << ' ' << std::setw(static_cast<int>(std::max<std::size_t>(vocab[j].size(), 5))) << rows[i][j];
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disaster visual-sentiment pipeline"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Fetch images for catalog-expanded keywords");
  std::string catalog_path, keywords, adapter_spec, manifest_out, dest_dir;
  std::size_t parallel = 1;
  bool keep_duplicates = false;
  ingest_cmd->add_option("--catalog", catalog_path, "Event catalog CSV (disaster_type,location,year)");
  ingest_cmd->add_option("--keywords", keywords, "Comma-separated base keywords")->required();
  ingest_cmd->add_option("--adapter", adapter_spec, "fixture:<dir> or http:<base-url>")->required();
  ingest_cmd->add_option("--out", manifest_out, "Manifest file to write")->required();
  ingest_cmd->add_option("--dest", dest_dir, "Image directory (default: <out dir>/images)");
  ingest_cmd->add_option("--parallel", parallel, "Concurrent queries")->capture_default_str();
  ingest_cmd->add_flag("--keep-duplicates", keep_duplicates, "Skip content-hash dedup");

  // mine-tags
  auto* mine_cmd = app.add_subcommand("mine-tags", "Rank metadata tokens and write a vocabulary");
  std::string mine_manifest, stopwords_path, vocab_out, curated_path;
  std::size_t min_count = 2, size_limit = 7, show = 20;
  mine_cmd->add_option("--manifest", mine_manifest)->required();
  mine_cmd->add_option("--stopwords", stopwords_path, "Stopword file, one per line");
  mine_cmd->add_option("--min-count", min_count)->capture_default_str();
  mine_cmd->add_option("--out", vocab_out, "Vocabulary file to write")->required();
  mine_cmd->add_option("--curated", curated_path, "Curated tags file (default: the seven disaster tags)");
  mine_cmd->add_option("--size-limit", size_limit, "Vocabulary size")->capture_default_str();
  mine_cmd->add_option("--show", show, "Ranked candidates to print")->capture_default_str();

  // serve-annotation
  auto* serve_cmd = app.add_subcommand("serve-annotation", "Run the annotation HTTP service");
  std::string serve_manifest, serve_vocab, store_dir, exclude_path, host = "127.0.0.1", ui_dir;
  int port = 8080;
  std::uint64_t serve_seed = std::random_device{}();
  serve_cmd->add_option("--manifest", serve_manifest, "Image manifest (used when creating the store)");
  serve_cmd->add_option("--vocab", serve_vocab, "Vocabulary file (used when creating the store)");
  serve_cmd->add_option("--store", store_dir, "Store directory")->required();
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--exclude", exclude_path, "Image ids to leave out of the pool");
  serve_cmd->add_option("--ui", ui_dir, "Static directory served at /");
  serve_cmd->add_option("--seed", serve_seed, "Task tie-break seed");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Print tag counts and co-occurrence of a store");
  std::string stats_store;
  stats_cmd->add_option("--store", stats_store)->required();

  // export-dataset
  auto* export_cmd = app.add_subcommand("export-dataset", "Aggregate responses into a dataset");
  std::string export_store, export_out, split_text = "0.6,0.2,0.2";
  double agreement = 0.4;
  std::uint64_t export_seed = 0;
  std::size_t min_responses = 5;
  export_cmd->add_option("--store", export_store)->required();
  export_cmd->add_option("--threshold", agreement, "Agreement fraction in (0, 1]")->capture_default_str();
  export_cmd->add_option("--split", split_text, "train,val,test ratios")->capture_default_str();
  export_cmd->add_option("--seed", export_seed)->capture_default_str();
  export_cmd->add_option("--out", export_out, "Dataset directory (default: <store>/dataset)");
  export_cmd->add_option("--min-responses", min_responses)->capture_default_str();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic object/background dataset");
  std::string synth_out, synth_split = "0.6,0.2,0.2";
  SyntheticOptions synth_opts;
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--count", synth_opts.count)->capture_default_str();
  synth_cmd->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth_cmd->add_option("--split", synth_split)->capture_default_str();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fine-tune a fused sigmoid classifier");
  std::string train_dataset, train_streams, ckpt_out;
  std::uint64_t backbone_seed = 0;
  TrainingConfig train_cfg;
  bool unfreeze = false;
  train_cmd->add_option("--dataset", train_dataset)->required();
  train_cmd->add_option("--streams", train_streams, "e.g. object:toy,scene:toy")->required();
  train_cmd->add_option("--out", ckpt_out, "Checkpoint file")->required();
  train_cmd->add_option("--backbone-seed", backbone_seed)->capture_default_str();
  add_training_options(train_cmd, train_cfg, unfreeze);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Tag one image");
  std::string predict_ckpt, predict_image;
  double predict_threshold = 0.5;
  predict_cmd->add_option("--ckpt", predict_ckpt)->required();
  predict_cmd->add_option("--image", predict_image)->required();
  predict_cmd->add_option("--threshold", predict_threshold)->capture_default_str();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint on a dataset split");
  std::string eval_ckpt, eval_dataset, eval_out, eval_label, eval_split = "test";
  double eval_threshold = 0.5;
  eval_cmd->add_option("--ckpt", eval_ckpt)->required();
  eval_cmd->add_option("--dataset", eval_dataset)->required();
  eval_cmd->add_option("--threshold", eval_threshold)->capture_default_str();
  eval_cmd->add_option("--out", eval_out, "Report file (JSON lines, appended)")->required();
  eval_cmd->add_option("--label", eval_label, "Model label for the report table");
  eval_cmd->add_option("--split", eval_split, "train, val or test")->capture_default_str();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Train and evaluate one configuration");
  ExperimentConfig exp_cfg;
  std::string exp_dataset, exp_streams, exp_out;
  bool exp_unfreeze = false;
  exp_cmd->add_option("--dataset", exp_dataset)->required();
  exp_cmd->add_option("--streams", exp_streams)->required();
  exp_cmd->add_option("--out", exp_out, "Output directory for reports and checkpoint")->required();
  exp_cmd->add_option("--label", exp_cfg.model_label);
  exp_cmd->add_option("--threshold", exp_cfg.threshold)->capture_default_str();
  exp_cmd->add_option("--backbone-seed", exp_cfg.backbone_seed)->capture_default_str();
  add_training_options(exp_cmd, exp_cfg.training, exp_unfreeze);

  // report
  auto* report_cmd = app.add_subcommand("report", "Render report files as a Model | Accuracy table");
  std::vector<std::string> report_inputs;
  report_cmd->add_option("--in", report_inputs, "Report files")->required();

  CLI11_PARSE(app, argc, argv);
  if (verbose) log::set_level(log::Level::debug);

  try {
    if (*ingest_cmd) {
      std::vector<EventCatalogEntry> catalog;
      if (!catalog_path.empty()) catalog = read_event_catalog(catalog_path);
      std::vector<std::string> base;
      for (const auto& k : text::split(keywords, ',')) {
        const auto t = text::trim(k);
        if (!t.empty()) base.push_back(t);
      }
      const auto queries = expand_keywords(base, catalog);
      auto adapter = make_source_adapter(adapter_spec);
      const fs::path out(manifest_out);
      const fs::path dest = dest_dir.empty() ? out.parent_path() / "images" : fs::path(dest_dir);
      auto records = ingest(*adapter, queries, dest, {parallel, 1});
      const auto fetched = records.size();
      if (!keep_duplicates) records = dedup(records);
      write_manifest(out, records);
      std::cout << queries.size() << " queries, " << fetched << " images fetched, " << records.size()
                << " written to " << out.string() << '\n';
    } else if (*mine_cmd) {
      const auto records = read_manifest(mine_manifest);
      std::set<std::string> stop;
      if (!stopwords_path.empty()) stop = read_stopwords(stopwords_path);
      const auto ranked = rank_candidates(records, stop, min_count);
      const auto curated = curated_path.empty() ? TagVocabulary::disaster_default().tags()
                                                : text::read_list_file(curated_path);
      const auto vocab = build_vocabulary(ranked, curated, size_limit);
      write_vocabulary(vocab_out, vocab);
      std::cout << "top candidates:\n";
      for (std::size_t i = 0; i < std::min(show, ranked.size()); ++i)
        std::cout << "  " << std::left << std::setw(20) << ranked[i].token << std::right << ranked[i].count << '\n';
      std::cout << "vocabulary (" << vocab.size() << "):";
      for (const auto& t : vocab.tags()) std::cout << ' ' << t;
      std::cout << '\n';
    } else if (*serve_cmd) {
      const fs::path dir(store_dir);
      if (!fs::exists(dir / "manifest.jsonl")) {
        if (serve_manifest.empty() || serve_vocab.empty())
          throw ConfigError("new store needs --manifest and --vocab");
        std::vector<std::string> excluded;
        if (!exclude_path.empty()) excluded = text::read_list_file(exclude_path);
        AnnotationStore::initialize(dir, read_manifest(serve_manifest), read_vocabulary(serve_vocab), excluded);
      } else if (!serve_manifest.empty()) {
        log::info("store exists; using its manifest snapshot");
      }
      auto store = AnnotationStore::open(dir, serve_seed);
      std::optional<fs::path> ui;
      if (!ui_dir.empty()) ui = ui_dir;
      // Block SIGINT/SIGTERM in every thread; this one waits for them.
      sigset_t stop_signals;
      sigemptyset(&stop_signals);
      sigaddset(&stop_signals, SIGINT);
      sigaddset(&stop_signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

      AnnotationServer server(*store, ui);
      if (server.bind(host, port) < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
      std::cout << "serving " << store->pool().size() << " images on http://" << host << ':' << server.port()
                << std::endl;
      std::thread worker([&server] { server.serve(); });
      int received = 0;
      sigwait(&stop_signals, &received);
      server.stop();
      worker.join();
      store->write_snapshot();
      log::info("stopped; stats snapshot written");
    } else if (*stats_cmd) {
      auto store = AnnotationStore::open(stats_store, 0);
      const auto s = store->stats();
      std::map<std::string, std::size_t> counts;
      for (std::size_t i = 0; i < s.vocabulary.size(); ++i) counts[s.vocabulary[i]] = s.tag_counts[i];
      std::cout << s.responses << " responses over " << s.images << " images (per image: min "
                << s.min_responses_per_image << ", max " << s.max_responses_per_image << ")\n\n";
      std::cout << render_tag_count_table(counts) << '\n';
      print_matrix(s.vocabulary, s.cooccurrence);
      if (!s.extra_tags.empty()) {
        std::cout << "\nextra tags:\n";
        for (const auto& [t, n] : s.extra_tags) std::cout << "  " << t << ' ' << n << '\n';
      }
      store->write_snapshot();
    } else if (*export_cmd) {
      auto store = AnnotationStore::open(export_store, 0);
      const auto responses = store->responses();
      GroundTruthOptions opts;
      opts.min_responses = min_responses;
      for (const auto& r : store->pool()) opts.image_ids.push_back(r.id);
      const auto gt = derive_ground_truth(responses, store->vocabulary(), agreement, opts);
      DatasetMeta meta;
      meta.threshold = agreement;
      meta.all_zero = gt.all_zero;
      meta.shortfall = gt.shortfall;
      const fs::path out = export_out.empty() ? fs::path(export_store) / "dataset" : fs::path(export_out);
      const auto split = export_dataset(gt.labels, store->pool(), store->vocabulary(),
                                        parse_split_ratios(split_text), export_seed, out, meta);
      store->write_snapshot();
      std::cout << "train " << split.train.size() << ", val " << split.val.size() << ", test "
                << split.test.size() << " written to " << out.string() << '\n';
      std::cout << gt.all_zero.size() << " images with no tag above threshold, " << gt.shortfall.size()
                << " with fewer than " << min_responses << " responses\n";
      for (const auto& s : gt.shortfall) std::cout << "  shortfall " << s.image_id << ' ' << s.responses << '\n';
    } else if (*synth_cmd) {
      const auto scenes = make_synthetic_scenes(synth_opts);
      const auto split = write_synthetic_dataset(synth_out, scenes, parse_split_ratios(synth_split), synth_opts.seed);
      std::cout << "train " << split.train.size() << ", val " << split.val.size() << ", test "
                << split.test.size() << " written to " << synth_out << '\n';
    } else if (*train_cmd) {
      train_cfg.freeze_backbones = !unfreeze;
      const auto dataset = read_dataset(train_dataset);
      const auto train = load_examples(dataset.train);
      FusionModel model(FusionConfig{parse_streams(train_streams)}, dataset.vocabulary, backbone_seed, train_cfg.seed);
      const auto result = fine_tune(model, train, train_cfg);
      save_checkpoint(ckpt_out, {model, train_cfg, result.epoch_loss, train_dataset});
      std::cout << "trained on " << train.size() << " images; loss " << result.initial_loss << " -> "
                << (result.epoch_loss.empty() ? result.initial_loss : result.epoch_loss.back()) << '\n';
    } else if (*predict_cmd) {
      const auto ckpt = load_checkpoint(predict_ckpt);
      const auto image = load_image(predict_image, fs::path(predict_image).filename().string());
      const auto p = predict_tags(ckpt.model, image, predict_threshold);
      const auto& vocab = ckpt.model.vocabulary();
      for (std::size_t i = 0; i < vocab.size(); ++i)
        std::cout << std::left << std::setw(14) << vocab[i] << std::right << std::fixed << std::setprecision(4)
                  << p.probabilities[i] << '\n';
      if (p.no_confident_tag()) {
        std::cout << "no confident tag\n";
      } else {
        std::cout << "tags:";
        for (const auto& t : p.tags) std::cout << ' ' << t;
        std::cout << '\n';
      }
    } else if (*eval_cmd) {
      const auto ckpt = load_checkpoint(eval_ckpt);
      const auto dataset = read_dataset(eval_dataset);
      if (!(dataset.vocabulary == ckpt.model.vocabulary()))
        throw ConfigError("checkpoint and dataset vocabularies differ");
      const auto& part = eval_split == "train" ? dataset.train : eval_split == "val" ? dataset.val : dataset.test;
      if (eval_split != "train" && eval_split != "val" && eval_split != "test")
        throw InvalidArgument("--split must be train, val or test");
      const auto data = load_examples(part);
      std::vector<BackboneSpec> streams = ckpt.model.config().streams;
      auto report = evaluate(ckpt.model, data, eval_threshold,
                             eval_label.empty() ? describe_streams(streams) : eval_label);
      report.config_hash = sha256_file(eval_ckpt);
      append_report(eval_out, report);
      std::cout << render_report(std::span(&report, 1));
      for (const auto& [tag, s] : report.per_label)
        std::cout << "  " << std::left << std::setw(14) << tag << std::right << std::fixed << std::setprecision(2)
                  << std::setw(6) << s.accuracy << "%  support " << s.support << '\n';
      std::cout << "  subset accuracy " << report.subset_accuracy << "%\n";
    } else if (*exp_cmd) {
      exp_cfg.dataset_dir = exp_dataset;
      exp_cfg.streams = parse_streams(exp_streams);
      exp_cfg.training.freeze_backbones = !exp_unfreeze;
      exp_cfg.out_dir = exp_out;
      const auto report = run_experiment(exp_cfg);
      std::cout << render_report(std::span(&report, 1));
    } else if (*report_cmd) {
      std::vector<MetricsReport> all;
      for (const auto& path : report_inputs) {
        auto part = read_reports(path);
        all.insert(all.end(), part.begin(), part.end());
      }
      std::cout << render_report(all);
    }
  } catch (const Error& e) {
    std::cerr << "vsent: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vsent: unexpected error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
