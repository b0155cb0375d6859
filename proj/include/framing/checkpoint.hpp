// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "framing/keyvalue.hpp"
#include "framing/model.hpp"

namespace framing {

/// Checkpoint JSON layout:
///
///   {"format": "framing-checkpoint", "version": 1,
///    "config": {key: value, ...},                 // config echo, strings
///    "shape": {"hidden", "layers", "init_range", "forget_bias"},
///    "vocabulary": [word, ...],                    // row i + 1 of "embedding"
///    "heads": [{"name", "label_set", "labels": [{"code", "name"}],
///               "adversarial", "reversal_strength"}],
///    "parameters": [{"name", "rows", "cols", "trainable", "values": [...]}]}
///
/// Doubles are written in shortest round-trip form, so save/load is bit-exact.
struct Checkpoint {
  Model model;
  KeyValues config;
};

void write_checkpoint(std::ostream& out, const Model& model, const KeyValues& config);
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const KeyValues& config);
Checkpoint read_checkpoint(std::istream& in, const std::string& source);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace framing
