// SPDX-License-Identifier: Apache-2.0
#include "framing/labels.hpp"

#include <algorithm>
#include <charconv>

#include "framing/error.hpp"

namespace framing {

LabelSet::LabelSet(std::string name, std::vector<std::pair<int, std::string>> entries)
    : name_(std::move(name)) {
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first) {
      throw ConfigError("label set '" + name_ + "' repeats code " +
                        std::to_string(entries[i].first));
    }
  }
  for (auto& [code, label] : entries) {
    codes_.push_back(code);
    names_.push_back(std::move(label));
  }
}

LabelSet LabelSet::frames() {
  return LabelSet("frames", {{1, "Economic"},
                             {5, "Legality/Jurisprudence/Constitutionality"},
                             {6, "Policy-prescription-and-evaluation"},
                             {7, "Crime-and-Punishment"},
                             {13, "Political"}});
}

LabelSet LabelSet::quality() { return LabelSet("quality", {{0, "low"}, {1, "high"}}); }

LabelSet LabelSet::domain() { return LabelSet("domain", {{0, "source"}, {1, "target"}}); }

LabelSet LabelSet::by_name(std::string_view name) {
  if (name == "frames") return frames();
  if (name == "quality") return quality();
  if (name == "domain") return domain();
  throw ConfigError("unknown label set '" + std::string(name) + "'");
}

LabelSet LabelSet::first(std::size_t k) const {
  if (k == 0 || k > codes_.size()) {
    throw ConfigError("label set '" + name_ + "' has " + std::to_string(codes_.size()) +
                      " labels, cannot take " + std::to_string(k));
  }
  std::vector<std::pair<int, std::string>> entries;
  for (std::size_t i = 0; i < k; ++i) entries.emplace_back(codes_[i], names_[i]);
  return LabelSet(name_, std::move(entries));
}

bool LabelSet::contains(int code) const {
  return std::binary_search(codes_.begin(), codes_.end(), code);
}

std::size_t LabelSet::index_of(int code) const {
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) {
    throw LabelError("label " + std::to_string(code) + " is not in label set '" + name_ + "'");
  }
  return static_cast<std::size_t>(it - codes_.begin());
}

int LabelSet::parse(std::string_view text) const {
  int code = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), code);
  if (ec == std::errc() && ptr == text.data() + text.size()) {
    index_of(code);
    return code;
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == text) return codes_[i];
  }
  throw LabelError("label '" + std::string(text) + "' is not in label set '" + name_ + "'");
}

}  // namespace framing
