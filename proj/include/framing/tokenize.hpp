// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace framing {

/// Rule-based tokenizer.
///
/// 1. ASCII letters are lowercased; other bytes are kept as they are.
/// 2. Whitespace separates chunks and never appears in a token.
/// 3. Inside a chunk, a word is a maximal run of word bytes: ASCII letters,
///    digits and any byte >= 0x80 (so UTF-8 sequences stay whole).
/// 4. An apostrophe or hyphen between two word bytes joins them ("don't",
///    "same-sex"); so does a '.' or ',' between two digits ("3.5", "10,480").
/// 5. Every other byte is a one-character punctuation token.
///
/// Joining the output with single spaces and tokenizing again returns the
/// same tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens joined by single spaces.
std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace framing
