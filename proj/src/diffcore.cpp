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

#include "repodsl/diffcore.hpp"

#include <algorithm>

#include "repodsl/error.hpp"

namespace repodsl::diff {
namespace {

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

bool IsIdent(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

}  // namespace

std::string TokenSeq::Reconstruct() const {
  std::string out = separators.empty() ? std::string() : separators[0];
  for (size_t i = 0; i < tokens.size(); ++i) {
    out += tokens[i];
    out += separators[i + 1];
  }
  return out;
}

TokenSeq Tokenize(std::string_view line) {
  TokenSeq seq;
  std::string gap;
  size_t i = 0;
  while (i < line.size()) {
    auto c = static_cast<unsigned char>(line[i]);
    if (IsSpace(c)) {
      gap.push_back(line[i++]);
      continue;
    }
    size_t j = i + 1;
    if (IsIdent(c)) {
      while (j < line.size() && IsIdent(static_cast<unsigned char>(line[j]))) ++j;
    }
    seq.separators.push_back(std::move(gap));
    gap.clear();
    seq.tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  seq.separators.push_back(std::move(gap));
  return seq;
}

size_t TokenLevenshtein(std::span<const std::string> t,
                        std::span<const std::string> p) {
  if (t.size() < p.size()) std::swap(t, p);
  std::vector<size_t> prev(p.size() + 1), cur(p.size() + 1);
  for (size_t j = 0; j <= p.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= t.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= p.size(); ++j) {
      size_t sub = prev[j - 1] + (t[i - 1] == p[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[p.size()];
}

double NormalizedLineError(std::string_view true_line,
                           std::string_view predicted_line) {
  TokenSeq t = Tokenize(true_line);
  TokenSeq p = Tokenize(predicted_line);
  size_t denom = std::max<size_t>({t.size(), p.size(), 1});
  double e = static_cast<double>(TokenLevenshtein(t.tokens, p.tokens)) /
             static_cast<double>(denom);
  return std::clamp(e, 0.0, 1.0);
}

std::string_view OpTagName(OpTag tag) {
  switch (tag) {
    case OpTag::kEqual: return "equal";
    case OpTag::kReplace: return "replace";
    case OpTag::kDelete: return "delete";
    case OpTag::kInsert: return "insert";
  }
  return "?";
}

std::string EditScript::Render() const {
  std::string out;
  for (const Opcode& op : opcodes) {
    out += "a[" + std::to_string(op.a_start) + ":" + std::to_string(op.a_end) +
           "] " + std::string(OpTagName(op.tag)) + " b[" +
           std::to_string(op.b_start) + ":" + std::to_string(op.b_end) + "]\n";
  }
  return out;
}

MatchBlock FindLongestMatch(std::span<const std::string> a,
                            std::span<const std::string> b, size_t alo,
                            size_t ahi, size_t blo, size_t bhi) {
  // cur[j - blo + 1] is the length of the common run ending at a[i], b[j].
  std::vector<size_t> prev(bhi - blo + 1, 0), cur(bhi - blo + 1, 0);
  MatchBlock best{alo, blo, 0};
  for (size_t i = alo; i < ahi; ++i) {
    for (size_t j = blo; j < bhi; ++j) {
      size_t k = j - blo;
      if (a[i] == b[j]) {
        cur[k + 1] = prev[k] + 1;
        // Strict '>' keeps the earliest end in a (and then in b); all
        // candidates share the same length, so earliest end == earliest start.
        if (cur[k + 1] > best.size) {
          best = {i + 1 - cur[k + 1], j + 1 - cur[k + 1], cur[k + 1]};
        }
      } else {
        cur[k + 1] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

std::vector<MatchBlock> MatchingBlocks(std::span<const std::string> a,
                                       std::span<const std::string> b) {
  struct Range {
    size_t alo, ahi, blo, bhi;
  };
  std::vector<Range> queue{{0, a.size(), 0, b.size()}};
  std::vector<MatchBlock> blocks;
  while (!queue.empty()) {
    Range r = queue.back();
    queue.pop_back();
    MatchBlock m = FindLongestMatch(a, b, r.alo, r.ahi, r.blo, r.bhi);
    if (m.size == 0) continue;
    blocks.push_back(m);
    if (r.alo < m.a && r.blo < m.b) queue.push_back({r.alo, m.a, r.blo, m.b});
    if (m.a + m.size < r.ahi && m.b + m.size < r.bhi) {
      queue.push_back({m.a + m.size, r.ahi, m.b + m.size, r.bhi});
    }
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const MatchBlock& x, const MatchBlock& y) {
              return x.a != y.a ? x.a < y.a : x.b < y.b;
            });
  std::vector<MatchBlock> merged;
  for (const MatchBlock& m : blocks) {
    if (!merged.empty() && merged.back().a + merged.back().size == m.a &&
        merged.back().b + merged.back().size == m.b) {
      merged.back().size += m.size;
    } else {
      merged.push_back(m);
    }
  }
  return merged;
}

EditScript LineDiff(std::span<const std::string> a,
                    std::span<const std::string> b) {
  std::vector<MatchBlock> blocks = MatchingBlocks(a, b);
  blocks.push_back({a.size(), b.size(), 0});
  EditScript script;
  size_t i = 0, j = 0;
  for (const MatchBlock& m : blocks) {
    if (i < m.a && j < m.b) {
      script.opcodes.push_back({OpTag::kReplace, i, m.a, j, m.b});
    } else if (i < m.a) {
      script.opcodes.push_back({OpTag::kDelete, i, m.a, j, m.b});
    } else if (j < m.b) {
      script.opcodes.push_back({OpTag::kInsert, i, m.a, j, m.b});
    }
    if (m.size > 0) {
      script.opcodes.push_back(
          {OpTag::kEqual, m.a, m.a + m.size, m.b, m.b + m.size});
    }
    i = m.a + m.size;
    j = m.b + m.size;
  }
  return script;
}

std::vector<std::string> ApplyEditScript(const EditScript& script,
                                         std::span<const std::string> a,
                                         std::span<const std::string> b) {
  std::vector<std::string> out;
  size_t i = 0, j = 0;
  for (const Opcode& op : script.opcodes) {
    if (op.a_start != i || op.b_start != j || op.a_end < op.a_start ||
        op.b_end < op.b_start || op.a_end > a.size() || op.b_end > b.size()) {
      throw ValidationError("edit script does not tile its inputs");
    }
    switch (op.tag) {
      case OpTag::kEqual:
        if (op.a_end - op.a_start != op.b_end - op.b_start) {
          throw ValidationError("equal opcode with unequal range lengths");
        }
        for (size_t k = 0; k < op.a_end - op.a_start; ++k) {
          if (a[op.a_start + k] != b[op.b_start + k]) {
            throw ValidationError("equal opcode over differing lines");
          }
          out.push_back(a[op.a_start + k]);
        }
        break;
      case OpTag::kDelete:
        break;
      case OpTag::kInsert:
      case OpTag::kReplace:
        out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(op.b_start),
                   b.begin() + static_cast<std::ptrdiff_t>(op.b_end));
        break;
    }
    i = op.a_end;
    j = op.b_end;
  }
  if (i != a.size() || j != b.size()) {
    throw ValidationError("edit script does not cover its inputs");
  }
  return out;
}

}  // namespace repodsl::diff
