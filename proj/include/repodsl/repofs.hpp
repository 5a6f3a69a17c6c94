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

// Linearized project snapshots: a folder tree with text leaves that converts
// to and from a directory on disk and a single nested JSON document.

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace repodsl::repofs {

struct Node;

// Children keyed by name segment. std::map keeps segments in lexicographic
// byte order, so two trees with the same content compare and serialize
// equal regardless of how they were built.
using Folder = std::map<std::string, Node, std::less<>>;

struct File {
  std::string content;

  friend bool operator==(const File&, const File&) = default;
};

struct Node {
  std::variant<Folder, File> value;

  Node() = default;
  Node(File f) : value(std::move(f)) {}      // NOLINT(runtime/explicit)
  Node(Folder f) : value(std::move(f)) {}    // NOLINT(runtime/explicit)

  bool is_file() const { return std::holds_alternative<File>(value); }
  bool is_folder() const { return std::holds_alternative<Folder>(value); }
  const File& file() const { return std::get<File>(value); }
  const Folder& folder() const { return std::get<Folder>(value); }
  Folder& folder() { return std::get<Folder>(value); }

  friend bool operator==(const Node&, const Node&) = default;
};

struct RepoSnapshot {
  Folder root;

  friend bool operator==(const RepoSnapshot&, const RepoSnapshot&) = default;
};

// Full path ("a/b/c.dsl") -> file content. Keys always use '/'.
using FlatView = std::map<std::string, std::string, std::less<>>;

// True when `segment` can name a file or folder: non-empty, not "." or
// "..", and free of '/', '\\' and NUL.
bool IsValidSegment(std::string_view segment);

// Throws ValidationError naming the first bad segment.
void ValidateSnapshot(const RepoSnapshot& snapshot);

// True when `text` is well-formed UTF-8 (no overlongs, no surrogates).
bool IsValidUtf8(std::string_view text);

// Reads `root_directory` into a snapshot. Throws IoError (unreadable entry,
// symlink, special file, missing root) or EncodingError (non-UTF-8 file).
RepoSnapshot Linearize(const std::filesystem::path& root_directory);

// Writes `snapshot` under `dest`, which must be absent or an empty
// directory. Throws RefusalError, ValidationError or IoError.
void Delinearize(const RepoSnapshot& snapshot,
                 const std::filesystem::path& dest);

FlatView Flatten(const RepoSnapshot& snapshot);

// Inverse of Flatten. Throws ValidationError on an invalid segment or when a
// path is used both as a file and as a folder.
RepoSnapshot Unflatten(const FlatView& flat);

// Strict parse of a linearized document. Throws SyntaxError when the text is
// not JSON, SchemaError when it is JSON of the wrong shape (non-object root,
// array or non-string leaf, duplicate or invalid key). Keys containing '/'
// are accepted as path-keyed shorthand and expanded into nested folders.
RepoSnapshot ParseSnapshot(std::string_view raw);

// Same schema rules applied to an already-parsed JSON value.
RepoSnapshot SnapshotFromJson(const nlohmann::json& value);
nlohmann::json SnapshotToJson(const RepoSnapshot& snapshot);

// Compact JSON with sorted keys; a pure function of the snapshot value.
std::string CanonicalSerialize(const RepoSnapshot& snapshot);

// One {"path":..,"content":..} JSON record per line, in path order.
std::string FlatRecords(const FlatView& flat);

// Every folder path (including empty folders) and every file path.
std::vector<std::string> AllPaths(const RepoSnapshot& snapshot);

// Folder paths only, including empty ones.
std::vector<std::string> FolderPaths(const RepoSnapshot& snapshot);

// Splits file content into lines on '\n'. A trailing newline does not open
// an extra empty line, and one '\r' before each '\n' is dropped.
std::vector<std::string> SplitLines(std::string_view content);

}  // namespace repodsl::repofs
