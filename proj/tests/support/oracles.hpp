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

// Reference implementations written independently of the library: they
// share no code with src/ and favour obviousness over speed.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Full (n+1) x (m+1) edit-distance table.
inline size_t Levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<size_t>> d(a.size() + 1, std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t del = d[i - 1][j] + 1;
      const size_t ins = d[i][j - 1] + 1;
      const size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min(del, std::min(ins, sub));
    }
  }
  return d[a.size()][b.size()];
}

// Longest common subsequence length.
inline size_t Lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<size_t>> d(a.size() + 1, std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = a[i - 1] == b[j - 1] ? d[i - 1][j - 1] + 1 : std::max(d[i - 1][j], d[i][j - 1]);
    }
  }
  return d[a.size()][b.size()];
}

inline std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      out.push_back(cur);
      cur.clear();
    } else {
      cur += text[i];
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Whitespace splits; [A-Za-z0-9_] and non-ASCII bytes form words; anything
// else is a single-character token.
inline std::vector<std::string> Tokens(const std::string& line) {
  auto word = [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
  };
  auto space = [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    const auto c = static_cast<unsigned char>(line[i]);
    if (space(c)) {
      ++i;
    } else if (word(c)) {
      size_t j = i;
      while (j < line.size() && word(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    } else {
      out.push_back(line.substr(i, 1));
      ++i;
    }
  }
  return out;
}

struct Op {
  char tag;  // 'e' equal, 'r' replace, 'd' delete, 'i' insert
  size_t a0, a1, b0, b1;
};

// Brute-force longest block: every (i, j) start is extended as far as it
// goes; the first strictly longer block wins, so ties keep the smallest i,
// then the smallest j.
inline void Blocks(const std::vector<std::string>& a, const std::vector<std::string>& b,
                   size_t alo, size_t ahi, size_t blo, size_t bhi,
                   std::vector<std::array<size_t, 3>>& out) {
  size_t bi = alo, bj = blo, bk = 0;
  for (size_t i = alo; i < ahi; ++i) {
    for (size_t j = blo; j < bhi; ++j) {
      size_t k = 0;
      while (i + k < ahi && j + k < bhi && a[i + k] == b[j + k]) ++k;
      if (k > bk) {
        bi = i;
        bj = j;
        bk = k;
      }
    }
  }
  if (bk == 0) return;
  Blocks(a, b, alo, bi, blo, bj, out);
  out.push_back({bi, bj, bk});
  Blocks(a, b, bi + bk, ahi, bj + bk, bhi, out);
}

inline std::vector<Op> Diff(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::array<size_t, 3>> raw;
  Blocks(a, b, 0, a.size(), 0, b.size(), raw);
  std::vector<std::array<size_t, 3>> blocks;
  for (const auto& m : raw) {
    if (!blocks.empty() && blocks.back()[0] + blocks.back()[2] == m[0] &&
        blocks.back()[1] + blocks.back()[2] == m[1]) {
      blocks.back()[2] += m[2];
    } else {
      blocks.push_back(m);
    }
  }
  blocks.push_back({a.size(), b.size(), 0});
  std::vector<Op> ops;
  size_t i = 0, j = 0;
  for (const auto& m : blocks) {
    if (i < m[0] && j < m[1]) ops.push_back({'r', i, m[0], j, m[1]});
    else if (i < m[0]) ops.push_back({'d', i, m[0], j, m[1]});
    else if (j < m[1]) ops.push_back({'i', i, m[0], j, m[1]});
    if (m[2] > 0) ops.push_back({'e', m[0], m[0] + m[2], m[1], m[1] + m[2]});
    i = m[0] + m[2];
    j = m[1] + m[2];
  }
  return ops;
}

inline size_t CodePoints(const std::string& s) {
  size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

// Change similarity over path -> content maps.
inline double ChangeSimilarity(const std::map<std::string, std::string>& ctx,
                               const std::map<std::string, std::string>& tgt,
                               const std::map<std::string, std::string>& pred,
                               double alpha, double w_max) {
  auto get = [](const std::map<std::string, std::string>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? std::string() : it->second;
  };
  std::set<std::string> keys;
  for (const auto& kv : ctx) keys.insert(kv.first);
  for (const auto& kv : tgt) keys.insert(kv.first);

  std::vector<std::string> truth;
  std::vector<double> errors;
  for (const std::string& key : keys) {
    const std::vector<std::string> c = Lines(get(ctx, key));
    const std::vector<std::string> t = Lines(get(tgt, key));
    const std::vector<std::string> p = Lines(get(pred, key));
    if (c == t) continue;

    // Error for every target line as seen from the prediction.
    std::vector<double> t_err(t.size(), 1.0);
    for (const Op& op : Diff(t, p)) {
      for (size_t k = 0; op.a0 + k < op.a1; ++k) {
        if (op.tag == 'e') {
          t_err[op.a0 + k] = 0.0;
        } else if (op.tag == 'r' && op.b0 + k < op.b1) {
          const auto tt = Tokens(t[op.a0 + k]);
          const auto pt = Tokens(p[op.b0 + k]);
          const size_t denom = std::max<size_t>(std::max(tt.size(), pt.size()), 1);
          t_err[op.a0 + k] = static_cast<double>(Levenshtein(tt, pt)) / static_cast<double>(denom);
        }
      }
    }
    std::vector<bool> c_kept(c.size(), false);
    for (const Op& op : Diff(c, p)) {
      if (op.tag == 'e') {
        for (size_t x = op.a0; x < op.a1; ++x) c_kept[x] = true;
      }
    }
    std::vector<size_t> t_changed, c_deleted;
    for (const Op& op : Diff(c, t)) {
      if (op.tag == 'i' || op.tag == 'r') {
        for (size_t x = op.b0; x < op.b1; ++x) t_changed.push_back(x);
      }
      if (op.tag == 'd') {
        for (size_t x = op.a0; x < op.a1; ++x) c_deleted.push_back(x);
      }
      if (op.tag == 'r') {
        const size_t paired = std::min(op.a1 - op.a0, op.b1 - op.b0);
        for (size_t x = op.a0 + paired; x < op.a1; ++x) c_deleted.push_back(x);
      }
    }
    for (size_t x : t_changed) {
      truth.push_back(t[x]);
      errors.push_back(t_err[x]);
    }
    for (size_t x : c_deleted) {
      truth.push_back(c[x]);
      errors.push_back(c_kept[x] ? 1.0 : 0.0);
    }
  }

  if (truth.empty()) {
    // Identity of the whole file maps.
    return tgt == pred ? 1.0 : 0.0;
  }
  double num = 0.0, den = 0.0, plain = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const double base = std::min(1.0, std::max(0.0, 1.0 - errors[i]));
    const double s = std::pow(base, alpha);
    const double w = std::min(std::log(1.0 + static_cast<double>(CodePoints(truth[i]))), w_max);
    num += s * w;
    den += w;
    plain += s;
  }
  return den > 0.0 ? num / den : plain / static_cast<double>(truth.size());
}

// Precision, recall and F1 by explicit set intersection.
struct Prf {
  double p, r, f1;
};

inline Prf SetF1(const std::vector<std::string>& truth, const std::vector<std::string>& pred) {
  std::set<std::string> t(truth.begin(), truth.end()), p(pred.begin(), pred.end());
  if (t.empty() && p.empty()) return {1.0, 1.0, 1.0};
  std::vector<std::string> both;
  std::set_intersection(t.begin(), t.end(), p.begin(), p.end(), std::back_inserter(both));
  const double prec = p.empty() ? 0.0 : static_cast<double>(both.size()) / static_cast<double>(p.size());
  const double rec = t.empty() ? 0.0 : static_cast<double>(both.size()) / static_cast<double>(t.size());
  const double f1 = prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
  return {prec, rec, f1};
}

}  // namespace oracle
