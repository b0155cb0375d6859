// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace framing {

/// Ordered set of integer label codes with display names. Codes are kept in
/// ascending order; a head's output index i is the i-th code, so ties in
/// argmax resolve to the lowest code.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::string name, std::vector<std::pair<int, std::string>> entries);

  /// The five issue frames: 1 Economic, 5 Legality/Jurisprudence/Constitutionality,
  /// 6 Policy-prescription-and-evaluation, 7 Crime-and-Punishment, 13 Political.
  static LabelSet frames();
  /// Binarized argument quality: 0 low, 1 high.
  static LabelSet quality();
  /// Domain discrimination: 0 source, 1 target.
  static LabelSet domain();
  /// One of "frames", "quality", "domain".
  static LabelSet by_name(std::string_view name);

  /// The first k codes of this set.
  LabelSet first(std::size_t k) const;

  const std::string& name() const { return name_; }
  std::size_t size() const { return codes_.size(); }
  const std::vector<int>& codes() const { return codes_; }
  const std::vector<std::string>& names() const { return names_; }

  bool contains(int code) const;
  /// Throws LabelError for codes outside the set.
  std::size_t index_of(int code) const;
  int code_at(std::size_t index) const { return codes_.at(index); }
  const std::string& name_of(int code) const { return names_[index_of(code)]; }
  /// Accepts a code ("7") or a display name ("Crime-and-Punishment").
  int parse(std::string_view text) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::string name_;
  std::vector<int> codes_;
  std::vector<std::string> names_;
};

}  // namespace framing
