// Copyright 2026 The repodsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Line diffing and token-level edit distance.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace repodsl::diff {

// Tokens of one line plus the whitespace around them. separators has
// tokens.size() + 1 entries: separators[0] precedes the first token and
// separators.back() trails the last, so Reconstruct() is lossless.
struct TokenSeq {
  std::vector<std::string> tokens;
  std::vector<std::string> separators;

  std::string Reconstruct() const;
  size_t size() const { return tokens.size(); }
};

// Whitespace separates tokens. A maximal run of identifier characters
// (ASCII letters, digits, '_', and any byte >= 0x80 so UTF-8 sequences stay
// whole) is one token; every other character is a token of its own.
TokenSeq Tokenize(std::string_view line);

// Minimal number of token insertions, deletions and substitutions.
size_t TokenLevenshtein(std::span<const std::string> t,
                        std::span<const std::string> p);

// d_lev(t, p) / max(|t|, |p|, 1) over Tokenize()d lines; always in [0, 1].
double NormalizedLineError(std::string_view true_line,
                           std::string_view predicted_line);

enum class OpTag { kEqual, kReplace, kDelete, kInsert };

std::string_view OpTagName(OpTag tag);

// Half-open ranges [a_start, a_end) and [b_start, b_end).
struct Opcode {
  OpTag tag;
  size_t a_start, a_end, b_start, b_end;

  friend bool operator==(const Opcode&, const Opcode&) = default;
};

struct EditScript {
  std::vector<Opcode> opcodes;

  // "a[0:2] equal b[0:2]", one opcode per line.
  std::string Render() const;
};

struct MatchBlock {
  size_t a, b, size;
};

// Longest common contiguous block of a[alo:ahi] and b[blo:bhi]. Among equally
// long blocks the one starting earliest in a wins, then earliest in b.
MatchBlock FindLongestMatch(std::span<const std::string> a,
                            std::span<const std::string> b, size_t alo,
                            size_t ahi, size_t blo, size_t bhi);

// Longest-matching-block recursion on both flanks, no junk heuristics.
// Returns the matching blocks in order, adjacent blocks merged.
std::vector<MatchBlock> MatchingBlocks(std::span<const std::string> a,
                                       std::span<const std::string> b);

EditScript LineDiff(std::span<const std::string> a,
                    std::span<const std::string> b);

// Rebuilds b from a using only the script and b's inserted/replacing lines.
// Throws ValidationError if an equal range disagrees or the script does not
// tile both sequences.
std::vector<std::string> ApplyEditScript(const EditScript& script,
                                         std::span<const std::string> a,
                                         std::span<const std::string> b);

}  // namespace repodsl::diff
