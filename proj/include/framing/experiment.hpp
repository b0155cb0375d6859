// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "framing/corpus.hpp"
#include "framing/embeddings.hpp"
#include "framing/keyvalue.hpp"
#include "framing/model.hpp"
#include "framing/train.hpp"

namespace framing {

/// Everything a training run reads. Labeled sets may be multi-label; they are
/// expanded to one copy per label for training.
struct ExperimentData {
  TaskDataset train;
  TaskDataset dev;
  std::optional<TaskDataset> test;
  /// Auxiliary supervised tasks; the dataset name becomes the head name.
  std::vector<TaskDataset> aux;
  /// Target-domain text for the domain discriminator.
  std::optional<TaskDataset> unlabeled;
  EmbeddingTable embeddings;
};

/// Data keys of a train config, in addition to TrainConfig::keys():
///   train, dev, test          corpus JSONL paths (test optional)
///   main_labels               label set name of the main task (frames)
///   main_classes              keep only the first k codes; 0 keeps all
///   aux                       comma list of name:label_set:path
///   unlabeled                 target-domain JSONL, labels not required
///   embeddings                word-vector text file; when absent, random
///                             vectors of embedding_dim are drawn with
///                             embedding_seed
/// Relative paths resolve against `base`.
const std::vector<std::string>& experiment_keys();
/// Copy of `kv` with every data path made absolute against `base`.
KeyValues resolve_experiment_paths(KeyValues kv, const std::filesystem::path& base);
ExperimentData load_experiment_data(const KeyValues& kv, const std::filesystem::path& base);

struct ExperimentRun {
  RunRecord record;
  Model model;
};

/// Heads: "main", then one per aux dataset (multitask and adversarial), then
/// "domain" (adversarial only), fed with the main training text labeled 0
/// and the unlabeled text labeled 1. Model initialisation and training draw
/// from Rng(seed).derive("model") and Rng(seed).derive("train").
std::vector<HeadSpec> experiment_heads(const ExperimentData& data, const TrainConfig& config);
ExperimentRun run_experiment(const ExperimentData& data, const TrainConfig& config,
                             std::uint64_t seed, const EpochObserver& observer = {});

std::vector<double> default_weight_grid();

struct GridResult {
  std::vector<GridCell> cells;
  std::size_t best = 0;
};

using GridProgress = std::function<void(double weight, std::uint64_t seed, const RunRecord&)>;

/// Trains every (weight, seed) pair, spread over `jobs` threads. Results do
/// not depend on `jobs`. `progress` is called under a lock.
GridResult grid_search_weight(const ExperimentData& data, const TrainConfig& config,
                              const std::vector<double>& grid, std::size_t jobs,
                              const GridProgress& progress = {});

}  // namespace framing
